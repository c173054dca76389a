#pragma once

#include "fciiml/parameters.hpp"

namespace fciiml {

enum class Side { Anode, Cathode };
enum class Gas { H2O, H2, O2, N2 };

const char* to_string(Side side);
const char* to_string(Gas gas);

/// Closure relations of the fuel-cell model. Every member is a pure function
/// of its arguments and the stored coefficients.
class Correlations {
public:
    explicit Correlations(const ModelParameters& params);

    const PhysicalConstants& constants() const { return constants_; }
    const MaterialParameters& material() const { return mat_; }

    /// Throws DomainError unless 273 <= T <= 373 K.
    static void check_temperature(double T);

    double p_sat(double T) const;
    double c_sat(double T) const { return p_sat(T) / (constants_.R * T); }

    /// Equilibrium ionomer water content. Cubic in the water activity up to
    /// RH = 1, then continued linearly with the slope matched at RH = 1.
    double lambda_eq(double T, double RH) const;

    double sigma_p(double lambda, double T) const; ///< [S/m]
    double D_lambda(double lambda, double T) const; ///< [m^2/s]
    double n_d(double lambda) const;

    double D_gas(Gas gas, double T) const;            ///< free-stream diffusivity
    double D_eff(Gas gas, double s, double T) const;  ///< porous-layer diffusivity
    double mu_water(double T) const;                  ///< [Pa s]
    double D_s(double s, double T) const;             ///< capillary diffusivity [m^2/s]
    double reduced_saturation(double s) const;

    double i0(Side side, double c_reactant, double T) const;
    double U(Side side, double c_reactant, double T) const;

    double gamma_e(double T) const;
    double gamma_c(double T) const;

private:
    PhysicalConstants constants_;
    MaterialParameters mat_;
    double eps_p_;
};

} // namespace fciiml
