#include "fciiml/source_terms.hpp"

#include <algorithm>
#include <cmath>

namespace fciiml {

double augmented_adsorption_source(double lambda, double lambda_eq, double beta_aug,
                                   const CellGeometry& geom, const MaterialParameters& mat)
{
    return mat.k_ad / (geom.h_cl * mat.V_m) * (beta_aug * lambda_eq - lambda);
}

ButlerVolmerResult butler_volmer_kinetics(double i0, double eta, double T, double beta_bv,
                                          const PhysicalConstants& constants)
{
    const double f = constants.F / (constants.R * T);
    double fwd = 2.0 * beta_bv * f * eta;
    double bwd = -2.0 * (1.0 - beta_bv) * f * eta;
    bool saturated = false;
    if (std::abs(fwd) > kButlerVolmerExponentCap || std::abs(bwd) > kButlerVolmerExponentCap) {
        saturated = true;
        fwd = std::clamp(fwd, -kButlerVolmerExponentCap, kButlerVolmerExponentCap);
        bwd = std::clamp(bwd, -kButlerVolmerExponentCap, kButlerVolmerExponentCap);
    }
    return {i0 * (std::exp(fwd) - std::exp(bwd)), eta, saturated};
}

ButlerVolmerResult butler_volmer(double c_reactant, double T, double phi_e, double phi_p,
                                 Side side, const Correlations& corr)
{
    const double eta = phi_e - phi_p - corr.U(side, c_reactant, T);
    return butler_volmer_kinetics(corr.i0(side, c_reactant, T), eta, T, corr.material().beta_bv,
                                  corr.constants());
}

ReactionRates reaction_rates(double j_an, double j_ca, const CellGeometry& geom,
                             const PhysicalConstants& constants)
{
    const double F = constants.F;
    ReactionRates r;
    r.r_H2 = -geom.a * j_an / (2.0 * F);
    r.r_O2 = geom.a * j_ca / (4.0 * F);
    r.r_H2O = -geom.a * j_ca / (2.0 * F);
    return r;
}

double evap_cond_source(double c_H2O, double c_sat, double s_red, double gamma_e, double gamma_c)
{
    const double excess = c_H2O - c_sat;
    if (excess < 0.0)
        return gamma_e * s_red * excess;
    if (excess > 0.0)
        return gamma_c * (1.0 - s_red) * excess;
    return 0.0;
}

double evap_cond_source(double c_H2O, double T, double s, const Correlations& corr)
{
    return evap_cond_source(c_H2O, corr.c_sat(T), corr.reduced_saturation(s), corr.gamma_e(T),
                            corr.gamma_c(T));
}

} // namespace fciiml
