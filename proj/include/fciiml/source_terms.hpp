#pragma once

#include "fciiml/correlations.hpp"

namespace fciiml {

/// Exponent arguments of the Butler-Volmer expression are clamped to this
/// magnitude; the result is then flagged as saturated.
inline constexpr double kButlerVolmerExponentCap = 50.0;

struct ButlerVolmerResult {
    double j = 0.0;          ///< interfacial current density [A/m^2]
    double eta = 0.0;        ///< overpotential [V]
    bool saturated = false;  ///< an exponent hit the clamp
};

/// Sorption source with the multiplicative augmentation applied to the
/// equilibrium content: k_ad/(h_cl V_m) * (beta_aug * lambda_eq - lambda).
double augmented_adsorption_source(double lambda, double lambda_eq, double beta_aug,
                                   const CellGeometry& geom, const MaterialParameters& mat);

/// j = i0 * (exp(2 beta F eta / RT) - exp(-2 (1 - beta) F eta / RT)).
ButlerVolmerResult butler_volmer_kinetics(double i0, double eta, double T, double beta_bv,
                                          const PhysicalConstants& constants);

/// Full form with eta = phi_e - phi_p - U(c, T). Positive at the anode.
ButlerVolmerResult butler_volmer(double c_reactant, double T, double phi_e, double phi_p,
                                 Side side, const Correlations& corr);

struct ReactionRates {
    double r_H2 = 0.0;  ///< anode CL [mol/(m^3 s)]
    double r_O2 = 0.0;  ///< cathode CL
    double r_H2O = 0.0; ///< cathode CL, water produced into the ionomer
};

/// Rates for an anode current density j_an (> 0) and cathode j_ca (< 0).
ReactionRates reaction_rates(double j_an, double j_ca, const CellGeometry& geom,
                             const PhysicalConstants& constants);

/// gamma_ec * (c_H2O - c_sat(T)) with the evaporation/condensation switch.
/// Positive values condense vapor into liquid.
double evap_cond_source(double c_H2O, double T, double s, const Correlations& corr);

/// Same switch with explicit rate constants; used by the public form above.
double evap_cond_source(double c_H2O, double c_sat, double s_red, double gamma_e, double gamma_c);

} // namespace fciiml
