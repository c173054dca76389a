#include "fciiml/correlations.hpp"

#include "fciiml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fciiml {

const char* to_string(Side side) { return side == Side::Anode ? "anode" : "cathode"; }

const char* to_string(Gas gas)
{
    switch (gas) {
    case Gas::H2O: return "H2O";
    case Gas::H2: return "H2";
    case Gas::O2: return "O2";
    case Gas::N2: return "N2";
    }
    return "?";
}

Correlations::Correlations(const ModelParameters& params)
    : constants_(params.constants), mat_(params.material), eps_p_(params.geometry.eps_p)
{
}

void Correlations::check_temperature(double T)
{
    if (!(T >= 273.0 && T <= 373.0))
        throw DomainError("temperature " + std::to_string(T) + " K outside [273, 373] K");
}

double Correlations::p_sat(double T) const
{
    const double Tc = T - 273.15;
    const double log10_atm = -2.1794 + 0.02953 * Tc - 9.1837e-5 * Tc * Tc + 1.4454e-7 * Tc * Tc * Tc;
    return 101325.0 * std::pow(10.0, log10_atm);
}

double Correlations::lambda_eq(double T, double RH) const
{
    check_temperature(T);
    if (!(RH >= 0.0))
        throw DomainError("relative humidity must be >= 0");
    const double c0 = mat_.lambda_eq_c0, c1 = mat_.lambda_eq_c1;
    const double c2 = mat_.lambda_eq_c2, c3 = mat_.lambda_eq_c3;
    if (RH <= 1.0)
        return c0 + RH * (c1 + RH * (c2 + RH * c3));
    const double at_one = c0 + c1 + c2 + c3;
    const double slope = c1 + 2.0 * c2 + 3.0 * c3;
    return at_one + slope * (RH - 1.0);
}

double Correlations::sigma_p(double lambda, double T) const
{
    const double x = mat_.sigma_p_c1 * lambda - mat_.sigma_p_c0;
    const double eps = mat_.sigma_p_smooth;
    // smooth max(x, 0) keeps a dry membrane resistive but conducting
    const double pos = 0.5 * (x + std::sqrt(x * x + eps * eps));
    return 100.0 * pos * std::exp(mat_.sigma_p_E * (1.0 / 303.0 - 1.0 / T));
}

double Correlations::D_lambda(double lambda, double T) const
{
    const double l = std::max(lambda, 0.0);
    return mat_.D_lambda_0 * l * (1.0 + mat_.D_lambda_A * std::exp(-l)) *
               std::exp(-mat_.D_lambda_E / T) +
           mat_.D_lambda_floor;
}

double Correlations::n_d(double lambda) const
{
    return mat_.n_d_sat * std::max(lambda, 0.0) / 22.0;
}

double Correlations::D_gas(Gas gas, double T) const
{
    double ref = 0.0;
    switch (gas) {
    case Gas::H2O: ref = mat_.D_H2O_ref; break;
    case Gas::H2: ref = mat_.D_H2_ref; break;
    case Gas::O2: ref = mat_.D_O2_ref; break;
    case Gas::N2: ref = mat_.D_N2_ref; break;
    }
    return ref * std::pow(T / mat_.T_ref, mat_.D_T_exp);
}

double Correlations::D_eff(Gas gas, double s, double T) const
{
    const double free = std::clamp(1.0 - s, 1.0e-3, 1.0);
    return D_gas(gas, T) * std::pow(eps_p_, mat_.bruggeman) * std::pow(free, mat_.sat_exp);
}

double Correlations::mu_water(double T) const
{
    return 2.414e-5 * std::pow(10.0, 247.8 / (T - 140.0));
}

double Correlations::reduced_saturation(double s) const
{
    return std::max(0.0, (s - mat_.s_im) / (1.0 - mat_.s_im));
}

double Correlations::D_s(double s, double T) const
{
    const double sr = reduced_saturation(s);
    return mat_.kappa / mu_water(T) * mat_.dpc_ds * (mat_.D_s_floor + sr * sr * sr);
}

double Correlations::i0(Side side, double c_reactant, double T) const
{
    const double R = constants_.R;
    const double c = std::max(c_reactant, 0.0);
    if (side == Side::Anode)
        return mat_.i0_an_ref * std::pow(c / mat_.c_ref_H2, mat_.gamma_an) *
               std::exp(-mat_.Ea_an / R * (1.0 / T - 1.0 / mat_.T_ref));
    return mat_.i0_ca_ref * std::pow(c / mat_.c_ref_O2, mat_.gamma_ca) *
           std::exp(-mat_.Ea_ca / R * (1.0 / T - 1.0 / mat_.T_ref));
}

double Correlations::U(Side side, double c_reactant, double T) const
{
    const double R = constants_.R, F = constants_.F;
    const double partial = std::max(c_reactant, 1.0e-12) * R * T / mat_.p_ref;
    if (side == Side::Anode)
        return -R * T / (2.0 * F) * std::log(partial);
    return mat_.U0_ca + mat_.dU_dT * (T - 298.15) + R * T / (4.0 * F) * std::log(partial);
}

double Correlations::gamma_e(double T) const { return mat_.gamma_e_ref * std::sqrt(T / mat_.T_ref); }

double Correlations::gamma_c(double T) const { return mat_.gamma_c_ref * std::sqrt(T / mat_.T_ref); }

} // namespace fciiml
