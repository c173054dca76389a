#pragma once

#include "fciiml/conditions.hpp"
#include "fciiml/correlations.hpp"
#include "fciiml/dae.hpp"
#include "fciiml/state.hpp"

#include <span>
#include <vector>

namespace fciiml {

/// Channel-side values seen by the through-cell model at one node.
struct ChannelBoundary {
    double T = 0.0;
    double cH2O_an = 0.0;
    double cH2_an = 0.0;
    double cH2O_ca = 0.0;
    double cO2_ca = 0.0;
    double s_ch_an = 0.0;
    double s_ch_ca = 0.0;
    double phi_ch = 0.0;
};

/// Through-cell unknowns at one node.
struct ThroughCellUnknowns {
    double lambda_an = 0.0;
    double lambda_ca = 0.0;
    double ccl_an = 0.0;
    double ccl_ca = 0.0;
    double scl_an = 0.0;
    double scl_ca = 0.0;
    double i_loc = 0.0;
    double phi_p_an = 0.0;
    double phi_p_ca = 0.0;

    double lambda_mb() const { return 0.5 * (lambda_an + lambda_ca); }
};

/// Molar fluxes per unit membrane area leaving the GDL into each channel
/// [mol/(m^2 s)], indexed by Gas; liquid in mol of water.
struct CouplingFluxes {
    double an[4] = {0.0, 0.0, 0.0, 0.0};
    double ca[4] = {0.0, 0.0, 0.0, 0.0};
    double liquid_an = 0.0;
    double liquid_ca = 0.0;
};

struct SourceTerms {
    double S_ad_an = 0.0, S_ad_ca = 0.0;  ///< [mol/(m^3 s)] per CL
    double S_ec_an = 0.0, S_ec_ca = 0.0;  ///< [mol/(m^3 s)] per pore layer
    double r_H2 = 0.0, r_O2 = 0.0, r_H2O = 0.0;
    double j_an = 0.0, j_ca = 0.0;        ///< interfacial current density
    double lambda_eq_an = 0.0, lambda_eq_ca = 0.0;
    double N_membrane = 0.0;              ///< water flux anode -> cathode
};

/// Through-cell balances at one node. Differential parts are time
/// derivatives; algebraic parts are normalized residuals.
struct ThroughCellResult {
    double dlambda_an = 0.0, dlambda_ca = 0.0;
    double dccl_an = 0.0, dccl_ca = 0.0;
    double dscl_an = 0.0, dscl_ca = 0.0;
    double r_anode_kinetics = 0.0;   ///< (i - a h_cl j_an) / i_scale
    double r_cathode_kinetics = 0.0; ///< (i + a h_cl j_ca) / i_scale
    double r_membrane_ohm = 0.0;     ///< (phi_p_an - phi_p_ca - i h_mb / sigma_p) / phi_scale
    CouplingFluxes flux;
    SourceTerms sources;
    bool kinetics_saturated = false;

    /// Rate of the x-averaged membrane water content.
    double dlambda_mb() const { return 0.5 * (dlambda_an + dlambda_ca); }
};

inline constexpr double kCurrentScale = 1.0e4;
inline constexpr double kPotentialScale = 1.0;

ThroughCellResult through_cell_residual(const ThroughCellUnknowns& u, const ChannelBoundary& ch,
                                        double beta_aug, const CellGeometry& geom,
                                        const Correlations& corr);

/// Inlet and outlet molar fluxes per unit channel cross-section
/// [mol/(m^2 s)]; liquid converted to mol of water.
struct ChannelFlows {
    double in_an[4] = {0, 0, 0, 0};
    double out_an[4] = {0, 0, 0, 0};
    double in_ca[4] = {0, 0, 0, 0};
    double out_ca[4] = {0, 0, 0, 0};
    double liquid_out_an = 0.0;
    double liquid_out_ca = 0.0;
};

/// Channel residuals at every node: time derivatives of the channel
/// concentrations and saturations, plus the normalized ideal-gas closure
/// that determines the velocities.
struct ChannelResult {
    std::vector<double> rate;        ///< indexed like CellState, channel entries only
    ChannelFlows flows;
};

/// Assembled reduced 1+1D cell model on the channel grid. One instance per
/// (case, augmentation field); not shared between threads.
class FuelCellModel final : public DaeSystem {
public:
    /// `delta` is the per-node augmentation; an empty span selects the
    /// unaugmented path.
    FuelCellModel(const ModelParameters& params, const OperatingConditions& oc,
                  std::span<const double> delta = {});

    std::size_t size() const override { return static_cast<std::size_t>(N_) * kVarsPerNode; }
    bool is_differential(std::size_t i) const override;
    std::span<const double> scales() const override { return scales_; }
    void rhs(std::span<const double> u, std::span<double> f) const override;
    const JacobianStructure& structure() const override { return structure_; }
    int project(std::span<double> u) const override;
    std::vector<std::string> block_names() const override;
    int block_of(std::size_t i) const override;
    std::string describe(std::size_t i) const override;

    int nodes() const { return N_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& weights() const { return omega_; }
    const ChannelProfiles& profiles() const { return profiles_; }
    const Correlations& correlations() const { return corr_; }
    const ModelParameters& parameters() const { return params_; }
    const OperatingConditions& conditions() const { return oc_; }
    const InletState& inlet(Side side) const { return side == Side::Anode ? inlet_an_ : inlet_ca_; }
    double inlet_velocity(Side side) const { return side == Side::Anode ? v_in_an_ : v_in_ca_; }
    double total_concentration(Side side, int node) const;
    double beta(int node) const { return delta_.empty() ? 1.0 : delta_[node]; }

    ChannelBoundary boundary(const CellState& s, int node) const;
    static ThroughCellUnknowns through_cell_unknowns(const CellState& s, int node);
    ThroughCellResult through_cell(const CellState& s, int node) const;
    ChannelResult channel_residual(const CellState& s,
                                   std::span<const CouplingFluxes> fluxes) const;

    /// Number of kinetics evaluations that hit the exponent clamp.
    long long kinetics_saturation_count() const { return saturations_; }

private:
    ModelParameters params_;
    Correlations corr_;
    OperatingConditions oc_;
    std::vector<double> delta_;
    int N_;
    double dy_;
    std::vector<double> y_, omega_;
    ChannelProfiles profiles_;
    std::vector<double> C_an_, C_ca_;
    InletState inlet_an_, inlet_ca_;
    double v_in_an_, v_in_ca_;
    std::vector<double> scales_;
    JacobianStructure structure_;
    mutable std::vector<CouplingFluxes> scratch_;
    mutable long long saturations_ = 0;
};

/// Global conservation diagnostics of a state (meaningful at steady state).
struct BalanceReport {
    double hydrogen_in = 0.0, hydrogen_out = 0.0, hydrogen_consumed = 0.0;
    double hydrogen_expected = 0.0;  ///< from the prescribed cell current
    double water_in = 0.0, water_out = 0.0, water_produced = 0.0;
    double hydrogen_rel_error = 0.0; ///< |in - out - consumed| / in
    double hydrogen_current_rel_error = 0.0; ///< |in - out - expected| / expected
    double water_rel_error = 0.0;    ///< |in + produced - out| / (in + produced)
    double ideal_gas_rel_error = 0.0; ///< max over nodes and sides
};

BalanceReport balances(const FuelCellModel& model, const CellState& state);

} // namespace fciiml
