#pragma once

#include "fciiml/keyvalue.hpp"

#include <string>

namespace fciiml {

struct PhysicalConstants {
    double F = 96485.33; ///< Faraday constant [C/mol]
    double R = 8.314;    ///< gas constant [J/(mol K)]
};

/// Cell and channel dimensions. All lengths in metres.
struct CellGeometry {
    double L_ch_an = 0.1;
    double L_ch_ca = 0.1;
    double w = 1.0e-3;    ///< channel width
    double h_ch = 1.0e-3; ///< channel height
    double h_gdl = 2.0e-4;
    double h_cl = 1.0e-5;
    double h_mb = 2.5e-5;
    double a = 1.0e7;    ///< catalyst specific surface area [1/m]
    double eps_p = 0.6;  ///< GDL/CL porosity
    double eps_i = 0.3;  ///< ionomer volume fraction in the CL
    int N_y = 20;

    double h_tot() const { return 2.0 * h_gdl + 2.0 * h_cl + h_mb; }
    /// Lumped pore thickness (GDL + CL) that hosts vapor and liquid water.
    double h_pore() const { return h_gdl + h_cl; }
    /// Channel length used to map the shared grid onto membrane area.
    double L_ref() const { return L_ch_ca; }

    void validate() const;
};

/// Coefficients of every closure relation. Defaults are Springer-type
/// correlations with placeholder cell data; all of them can be overridden
/// from a constants file.
struct MaterialParameters {
    double V_m = 5.5e-4;  ///< dry membrane equivalent volume [m^3/mol]
    double V_w = 1.8e-5;  ///< liquid water molar volume [m^3/mol]
    double k_ad = 5.0e-5; ///< sorption rate [m/s]
    double sigma_e = 1000.0;  ///< GDL electron conductivity [S/m]
    double sigma_ch = 2.0e4;  ///< channel plate sheet conductance [S]
    double s_im = 0.1;
    double beta_bv = 0.5;

    // proton conductivity, S/cm form: (c1*lambda - c0)*exp(E*(1/303 - 1/T))
    double sigma_p_c1 = 0.005139;
    double sigma_p_c0 = 0.00326;
    double sigma_p_E = 1268.0;
    double sigma_p_smooth = 2.0e-3;

    // membrane water diffusivity: D0*lambda*(1 + A*exp(-lambda))*exp(-E/T) + floor
    double D_lambda_0 = 4.17e-8;
    double D_lambda_A = 161.0;
    double D_lambda_E = 2346.0;
    double D_lambda_floor = 1.0e-12;

    double n_d_sat = 2.5; ///< drag coefficient at lambda = 22

    // equilibrium water content cubic in activity
    double lambda_eq_c0 = 0.043;
    double lambda_eq_c1 = 17.81;
    double lambda_eq_c2 = -39.85;
    double lambda_eq_c3 = 36.0;

    // binary gas diffusivities at T_ref [m^2/s], temperature exponent
    double D_H2O_ref = 3.0e-5;
    double D_H2_ref = 1.0e-4;
    double D_O2_ref = 2.5e-5;
    double D_N2_ref = 2.5e-5;
    double D_T_exp = 1.75;
    double bruggeman = 1.5;
    double sat_exp = 2.0;

    // capillary diffusivity D_s = (kappa/mu(T)) * dpc_ds * (floor + s_red^3)
    double kappa = 1.0e-12;
    double dpc_ds = 2.0e4;
    double D_s_floor = 1.0e-3;

    // exchange current i0_ref*(c/c_ref)^gamma*exp(-Ea/R*(1/T - 1/T_ref)) [A/m^2]
    double i0_an_ref = 10.0;
    double i0_ca_ref = 1.0e-3;
    double c_ref_H2 = 40.0;
    double c_ref_O2 = 10.0;
    double gamma_an = 0.5;
    double gamma_ca = 1.0;
    double Ea_an = 16.0e3;
    double Ea_ca = 66.0e3;

    double U0_ca = 1.229;
    double dU_dT = -8.456e-4;
    double p_ref = 101325.0;

    // phase change rates at T_ref [1/s], scaled by sqrt(T/T_ref)
    double gamma_e_ref = 1.0e3;
    double gamma_c_ref = 1.0e3;

    double T_ref = 353.15;
};

/// Everything the model needs besides the operating point.
struct ModelParameters {
    PhysicalConstants constants;
    CellGeometry geometry;
    MaterialParameters material;

    static ModelParameters defaults() { return {}; }
    /// Overrides defaults with every key present in the file; unknown keys
    /// are rejected.
    static ModelParameters from_keyvalue(const KeyValueFile& kv);
    static ModelParameters load(const std::string& path);
    KeyValueFile to_keyvalue() const;
};

} // namespace fciiml
