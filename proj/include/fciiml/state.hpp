#pragma once

#include "fciiml/correlations.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace fciiml {

/// Unknowns stored per channel node, node-major. Channel velocities live on
/// the downstream face of each node's control volume.
enum class Var : int {
    cH2O_an,   ///< anode channel vapor
    cH2_an,    ///< anode channel hydrogen
    v_an,      ///< anode channel gas velocity
    s_ch_an,   ///< anode channel liquid saturation
    cH2O_ca,
    cO2_ca,
    cN2_ca,
    v_ca,
    s_ch_ca,
    lambda_an, ///< anode CL ionomer water content
    lambda_ca,
    ccl_an,    ///< anode CL vapor concentration
    ccl_ca,
    scl_an,    ///< anode CL liquid saturation
    scl_ca,
    i_loc,     ///< local current density
    phi_p_an,  ///< proton potential in the anode CL
    phi_p_ca,
    phi_ch,    ///< cathode plate (channel) electron potential
    I_plate,   ///< plate current collected between this node and y = 1
    Count
};

inline constexpr int kVarsPerNode = static_cast<int>(Var::Count);

const char* to_string(Var v);

/// All discretized fields of one case. Owned by a single solver at a time.
class CellState {
public:
    CellState() = default;
    explicit CellState(int N) : N_(N), u_(static_cast<std::size_t>(N) * kVarsPerNode, 0.0) {}

    int nodes() const { return N_; }
    std::size_t size() const { return u_.size(); }

    static std::size_t index(int node, Var v)
    {
        return static_cast<std::size_t>(node) * kVarsPerNode + static_cast<std::size_t>(v);
    }

    double& operator()(int node, Var v) { return u_[index(node, v)]; }
    double operator()(int node, Var v) const { return u_[index(node, v)]; }

    std::span<double> values() { return u_; }
    std::span<const double> values() const { return u_; }

    /// Field across all nodes.
    std::vector<double> field(Var v) const;

    double lambda_mb(int node) const
    {
        return 0.5 * ((*this)(node, Var::lambda_an) + (*this)(node, Var::lambda_ca));
    }
    std::vector<double> lambda_mb() const;
    std::vector<double> i_loc() const { return field(Var::i_loc); }

    /// Channel concentration of `gas` on `side` (zero for absent species).
    double c_ch(Side side, Gas gas, int node) const;
    double c_ch_total(Side side, int node) const;

    /// Terminal voltage: plate potential at the current collector (y = 0).
    double V_cell() const { return (*this)(0, Var::phi_ch); }

    bool operator==(const CellState&) const = default;

private:
    int N_ = 0;
    std::vector<double> u_;
};

} // namespace fciiml
