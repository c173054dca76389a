#pragma once

#include "fciiml/correlations.hpp"

#include <vector>

namespace fciiml {

/// Operating point of one case. The coolant enters at y = 1 (anode inlet),
/// the cathode gas at y = 0.
struct OperatingConditions {
    double T_in = 343.15;     ///< coolant inlet temperature [K]
    double dT = 5.0;          ///< coolant temperature rise [K]
    double p_in_an = 1.5e5;   ///< [Pa]
    double dp_an = -1.0e4;    ///< pressure change inlet to outlet [Pa]
    double p_in_ca = 1.5e5;
    double dp_ca = -1.0e4;
    double RH_an_in = 0.6;
    double RH_ca_in = 0.6;
    double stoich_an = 1.5;
    double stoich_ca = 2.0;
    double i_cell = 1.0e4;    ///< mean current density [A/m^2]
    int case_id = 0;

    /// Throws DomainError when any invariant is violated.
    void validate() const;
};

struct ChannelProfiles {
    std::vector<double> T;     ///< channel temperature, both sides
    std::vector<double> p_an;
    std::vector<double> p_ca;
};

/// Linear temperature and pressure profiles on the normalized grid.
ChannelProfiles channel_profiles(const OperatingConditions& oc, const std::vector<double>& y);

/// Node coordinates y_n = n / (N - 1), n = 0..N-1.
std::vector<double> uniform_grid(int N);

/// Inlet gas composition of one side [mol/m^3], indexed by Gas.
struct InletState {
    double T = 0.0;
    double p = 0.0;
    double c[4] = {0.0, 0.0, 0.0, 0.0};
    double total() const { return c[0] + c[1] + c[2] + c[3]; }
};

/// Anode: humidified hydrogen at (T_in, p_in_an). Cathode: humidified air
/// (21 % O2 in the dry gas) at (T_in + dT, p_in_ca).
InletState inlet_state(const OperatingConditions& oc, Side side, const Correlations& corr);

/// Minimum current used when sizing the inlet flow, so that open-circuit
/// cases keep a finite purge flow [A/m^2].
inline constexpr double kMinFlowCurrent = 1000.0;

/// Inlet velocity such that the reactant supply equals stoich times the
/// reacted amount at max(i_cell, kMinFlowCurrent).
double inlet_velocity(const OperatingConditions& oc, Side side, const CellGeometry& geom,
                      const Correlations& corr);

} // namespace fciiml
