#include "fciiml/state.hpp"

namespace fciiml {

const char* to_string(Var v)
{
    static constexpr std::array<const char*, kVarsPerNode> names{
        "c_H2O_ch_an", "c_H2_ch_an", "v_ch_an", "s_ch_an", "c_H2O_ch_ca", "c_O2_ch_ca",
        "c_N2_ch_ca", "v_ch_ca", "s_ch_ca", "lambda_cl_an", "lambda_cl_ca", "c_H2O_cl_an",
        "c_H2O_cl_ca", "s_cl_an", "s_cl_ca", "i_loc", "phi_p_an", "phi_p_ca", "phi_e_ch_ca",
        "I_plate"};
    const int k = static_cast<int>(v);
    return (k >= 0 && k < kVarsPerNode) ? names[k] : "?";
}

std::vector<double> CellState::field(Var v) const
{
    std::vector<double> out(static_cast<std::size_t>(N_));
    for (int n = 0; n < N_; ++n)
        out[n] = (*this)(n, v);
    return out;
}

std::vector<double> CellState::lambda_mb() const
{
    std::vector<double> out(static_cast<std::size_t>(N_));
    for (int n = 0; n < N_; ++n)
        out[n] = lambda_mb(n);
    return out;
}

double CellState::c_ch(Side side, Gas gas, int node) const
{
    if (side == Side::Anode) {
        switch (gas) {
        case Gas::H2O: return (*this)(node, Var::cH2O_an);
        case Gas::H2: return (*this)(node, Var::cH2_an);
        default: return 0.0;
        }
    }
    switch (gas) {
    case Gas::H2O: return (*this)(node, Var::cH2O_ca);
    case Gas::O2: return (*this)(node, Var::cO2_ca);
    case Gas::N2: return (*this)(node, Var::cN2_ca);
    default: return 0.0;
    }
}

double CellState::c_ch_total(Side side, int node) const
{
    if (side == Side::Anode)
        return (*this)(node, Var::cH2O_an) + (*this)(node, Var::cH2_an);
    return (*this)(node, Var::cH2O_ca) + (*this)(node, Var::cO2_ca) + (*this)(node, Var::cN2_ca);
}

} // namespace fciiml
