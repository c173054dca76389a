#include "fciiml/parameters.hpp"

#include "fciiml/errors.hpp"

#include <set>

namespace fciiml {

namespace {

template <class Fn>
void visit_fields(ModelParameters& p, Fn&& fn)
{
    auto& c = p.constants;
    fn("F", c.F);
    fn("R", c.R);

    auto& g = p.geometry;
    fn("L_ch_an", g.L_ch_an);
    fn("L_ch_ca", g.L_ch_ca);
    fn("w", g.w);
    fn("h_ch", g.h_ch);
    fn("h_gdl", g.h_gdl);
    fn("h_cl", g.h_cl);
    fn("h_mb", g.h_mb);
    fn("a", g.a);
    fn("eps_p", g.eps_p);
    fn("eps_i", g.eps_i);

    auto& m = p.material;
    fn("V_m", m.V_m);
    fn("V_w", m.V_w);
    fn("k_ad", m.k_ad);
    fn("sigma_e", m.sigma_e);
    fn("sigma_ch", m.sigma_ch);
    fn("s_im", m.s_im);
    fn("beta_bv", m.beta_bv);
    fn("sigma_p_c1", m.sigma_p_c1);
    fn("sigma_p_c0", m.sigma_p_c0);
    fn("sigma_p_E", m.sigma_p_E);
    fn("sigma_p_smooth", m.sigma_p_smooth);
    fn("D_lambda_0", m.D_lambda_0);
    fn("D_lambda_A", m.D_lambda_A);
    fn("D_lambda_E", m.D_lambda_E);
    fn("D_lambda_floor", m.D_lambda_floor);
    fn("n_d_sat", m.n_d_sat);
    fn("lambda_eq_c0", m.lambda_eq_c0);
    fn("lambda_eq_c1", m.lambda_eq_c1);
    fn("lambda_eq_c2", m.lambda_eq_c2);
    fn("lambda_eq_c3", m.lambda_eq_c3);
    fn("D_H2O_ref", m.D_H2O_ref);
    fn("D_H2_ref", m.D_H2_ref);
    fn("D_O2_ref", m.D_O2_ref);
    fn("D_N2_ref", m.D_N2_ref);
    fn("D_T_exp", m.D_T_exp);
    fn("bruggeman", m.bruggeman);
    fn("sat_exp", m.sat_exp);
    fn("kappa", m.kappa);
    fn("dpc_ds", m.dpc_ds);
    fn("D_s_floor", m.D_s_floor);
    fn("i0_an_ref", m.i0_an_ref);
    fn("i0_ca_ref", m.i0_ca_ref);
    fn("c_ref_H2", m.c_ref_H2);
    fn("c_ref_O2", m.c_ref_O2);
    fn("gamma_an", m.gamma_an);
    fn("gamma_ca", m.gamma_ca);
    fn("Ea_an", m.Ea_an);
    fn("Ea_ca", m.Ea_ca);
    fn("U0_ca", m.U0_ca);
    fn("dU_dT", m.dU_dT);
    fn("p_ref", m.p_ref);
    fn("gamma_e_ref", m.gamma_e_ref);
    fn("gamma_c_ref", m.gamma_c_ref);
    fn("T_ref", m.T_ref);
}

} // namespace

void CellGeometry::validate() const
{
    for (double v : {L_ch_an, L_ch_ca, w, h_ch, h_gdl, h_cl, h_mb, a})
        if (!(v > 0.0))
            throw ConfigError("geometry: all lengths and the specific area must be > 0");
    if (!(eps_p > 0.0 && eps_p < 1.0) || !(eps_i > 0.0 && eps_i < 1.0))
        throw ConfigError("geometry: porosity and ionomer fraction must lie in (0, 1)");
    if (N_y < 2)
        throw ConfigError("geometry: N_y must be >= 2");
}

ModelParameters ModelParameters::from_keyvalue(const KeyValueFile& kv)
{
    ModelParameters p;
    std::set<std::string> known{"N_y", "format_version", "kind"};
    visit_fields(p, [&](const char* name, double& field) {
        known.insert(name);
        if (kv.has(name))
            field = kv.get_double(name);
    });
    if (kv.has("N_y"))
        p.geometry.N_y = static_cast<int>(kv.get_int("N_y"));
    for (const auto& k : kv.keys())
        if (!known.count(k))
            throw ConfigError(kv.origin() + ": unknown constants key '" + k + "'");
    if (!(p.constants.F > 0.0 && p.constants.R > 0.0))
        throw ConfigError("constants: F and R must be > 0");
    if (!(p.material.beta_bv > 0.0 && p.material.beta_bv < 1.0))
        throw ConfigError("constants: beta_bv must lie in (0, 1)");
    if (!(p.material.s_im >= 0.0 && p.material.s_im < 1.0))
        throw ConfigError("constants: s_im must lie in [0, 1)");
    p.geometry.validate();
    return p;
}

ModelParameters ModelParameters::load(const std::string& path)
{
    return from_keyvalue(KeyValueFile::load(path));
}

KeyValueFile ModelParameters::to_keyvalue() const
{
    KeyValueFile kv;
    kv.set_comment("fuel-cell model constants and correlation coefficients (SI units)");
    kv.set("kind", std::string("constants"));
    kv.set("format_version", 1);
    kv.set("N_y", geometry.N_y);
    ModelParameters copy = *this;
    visit_fields(copy, [&](const char* name, double& field) { kv.set(name, field); });
    return kv;
}

} // namespace fciiml
