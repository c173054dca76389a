#include "fciiml/model.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/source_terms.hpp"

#include <algorithm>
#include <cmath>

namespace fciiml {

namespace {

constexpr int g(Gas k) { return static_cast<int>(k); }

double smooth_positive(double c)
{
    constexpr double eps = 1.0e-3;
    return 0.5 * (c + std::sqrt(c * c + eps * eps));
}

bool is_local(Var v)
{
    const int k = static_cast<int>(v);
    return k >= static_cast<int>(Var::lambda_an) && k <= static_cast<int>(Var::phi_p_ca);
}

double scale_of(Var v)
{
    switch (v) {
    case Var::cH2O_an: case Var::cH2_an: case Var::cH2O_ca: case Var::cO2_ca: case Var::cN2_ca:
    case Var::ccl_an: case Var::ccl_ca:
        return 10.0;
    case Var::lambda_an: case Var::lambda_ca:
        return 10.0;
    case Var::i_loc: case Var::I_plate:
        return kCurrentScale;
    default:
        return 1.0;
    }
}

} // namespace

ThroughCellResult through_cell_residual(const ThroughCellUnknowns& u, const ChannelBoundary& ch,
                                        double beta_aug, const CellGeometry& geom,
                                        const Correlations& corr)
{
    const auto& mat = corr.material();
    const double F = corr.constants().F;
    const double R = corr.constants().R;
    const double T = ch.T;
    const double h_pore = geom.h_pore();
    const double i = u.i_loc;
    ThroughCellResult r;
    auto& src = r.sources;

    // reactants at the CL, quasi-steady diffusion across the GDL
    const double c_H2 =
        smooth_positive(ch.cH2_an - i / (2.0 * F) * geom.h_gdl / corr.D_eff(Gas::H2, u.scl_an, T));
    const double c_O2 =
        smooth_positive(ch.cO2_ca - i / (4.0 * F) * geom.h_gdl / corr.D_eff(Gas::O2, u.scl_ca, T));

    const double phi_e_an = -i * geom.h_gdl / mat.sigma_e;
    const double phi_e_ca = ch.phi_ch + i * geom.h_gdl / mat.sigma_e;
    const auto bv_an = butler_volmer(c_H2, T, phi_e_an, u.phi_p_an, Side::Anode, corr);
    const auto bv_ca = butler_volmer(c_O2, T, phi_e_ca, u.phi_p_ca, Side::Cathode, corr);
    r.kinetics_saturated = bv_an.saturated || bv_ca.saturated;
    src.j_an = bv_an.j;
    src.j_ca = bv_ca.j;
    r.r_anode_kinetics = (i - geom.a * geom.h_cl * bv_an.j) / kCurrentScale;
    r.r_cathode_kinetics = (i + geom.a * geom.h_cl * bv_ca.j) / kCurrentScale;

    const double lmb = u.lambda_mb();
    r.r_membrane_ohm =
        (u.phi_p_an - u.phi_p_ca - i * geom.h_mb / corr.sigma_p(lmb, T)) / kPotentialScale;

    const auto rates = reaction_rates(bv_an.j, bv_ca.j, geom, corr.constants());
    src.r_H2 = rates.r_H2;
    src.r_O2 = rates.r_O2;
    src.r_H2O = rates.r_H2O;

    const double psat = corr.p_sat(T);
    src.lambda_eq_an = corr.lambda_eq(T, std::max(u.ccl_an, 0.0) * R * T / psat);
    src.lambda_eq_ca = corr.lambda_eq(T, std::max(u.ccl_ca, 0.0) * R * T / psat);
    src.S_ad_an = augmented_adsorption_source(u.lambda_an, src.lambda_eq_an, beta_aug, geom, mat);
    src.S_ad_ca = augmented_adsorption_source(u.lambda_ca, src.lambda_eq_ca, beta_aug, geom, mat);

    src.N_membrane = corr.n_d(lmb) / F * i -
                     corr.D_lambda(lmb, T) / mat.V_m * (u.lambda_ca - u.lambda_an) / geom.h_mb;
    const double C_ion = (geom.eps_i * geom.h_cl + 0.5 * geom.h_mb) / mat.V_m;
    r.dlambda_an = (geom.h_cl * src.S_ad_an - src.N_membrane) / C_ion;
    r.dlambda_ca = (geom.h_cl * src.S_ad_ca + src.N_membrane + geom.h_cl * src.r_H2O) / C_ion;

    // vapor and liquid in the lumped GDL + CL pore space
    const double Jv_an = corr.D_eff(Gas::H2O, u.scl_an, T) * (ch.cH2O_an - u.ccl_an) / geom.h_gdl;
    const double Jv_ca = corr.D_eff(Gas::H2O, u.scl_ca, T) * (ch.cH2O_ca - u.ccl_ca) / geom.h_gdl;
    src.S_ec_an = evap_cond_source(u.ccl_an, T, u.scl_an, corr);
    src.S_ec_ca = evap_cond_source(u.ccl_ca, T, u.scl_ca, corr);
    r.dccl_an = (Jv_an - geom.h_cl * src.S_ad_an - h_pore * src.S_ec_an) /
                (geom.eps_p * (1.0 - u.scl_an) * h_pore);
    r.dccl_ca = (Jv_ca - geom.h_cl * src.S_ad_ca - h_pore * src.S_ec_ca) /
                (geom.eps_p * (1.0 - u.scl_ca) * h_pore);

    const double Jl_an = corr.D_s(u.scl_an, T) *
                         (corr.reduced_saturation(u.scl_an) - ch.s_ch_an) / (mat.V_w * geom.h_gdl);
    const double Jl_ca = corr.D_s(u.scl_ca, T) *
                         (corr.reduced_saturation(u.scl_ca) - ch.s_ch_ca) / (mat.V_w * geom.h_gdl);
    r.dscl_an = (h_pore * src.S_ec_an - Jl_an) * mat.V_w / (geom.eps_p * h_pore);
    r.dscl_ca = (h_pore * src.S_ec_ca - Jl_ca) * mat.V_w / (geom.eps_p * h_pore);

    r.flux.an[g(Gas::H2O)] = -Jv_an;
    r.flux.an[g(Gas::H2)] = geom.h_cl * src.r_H2;
    r.flux.ca[g(Gas::H2O)] = -Jv_ca;
    r.flux.ca[g(Gas::O2)] = geom.h_cl * src.r_O2;
    r.flux.liquid_an = Jl_an;
    r.flux.liquid_ca = Jl_ca;
    return r;
}

FuelCellModel::FuelCellModel(const ModelParameters& params, const OperatingConditions& oc,
                             std::span<const double> delta)
    : params_(params), corr_(params), oc_(oc), delta_(delta.begin(), delta.end()),
      N_(params.geometry.N_y)
{
    params_.geometry.validate();
    oc_.validate();
    if (N_ < 3)
        throw DomainError("grid needs at least 3 nodes");
    if (!delta_.empty() && static_cast<int>(delta_.size()) != N_)
        throw DomainError("augmentation field size " + std::to_string(delta_.size()) +
                          " does not match grid size " + std::to_string(N_));
    for (double d : delta_)
        if (!std::isfinite(d))
            throw DomainError("augmentation field contains non-finite values");

    y_ = uniform_grid(N_);
    dy_ = 1.0 / (N_ - 1);
    omega_.assign(N_, dy_);
    omega_.front() = omega_.back() = 0.5 * dy_;
    profiles_ = channel_profiles(oc_, y_);
    const double R = corr_.constants().R;
    C_an_.resize(N_);
    C_ca_.resize(N_);
    for (int n = 0; n < N_; ++n) {
        C_an_[n] = profiles_.p_an[n] / (R * profiles_.T[n]);
        C_ca_[n] = profiles_.p_ca[n] / (R * profiles_.T[n]);
    }
    inlet_an_ = inlet_state(oc_, Side::Anode, corr_);
    inlet_ca_ = inlet_state(oc_, Side::Cathode, corr_);
    v_in_an_ = fciiml::inlet_velocity(oc_, Side::Anode, params_.geometry, corr_);
    v_in_ca_ = fciiml::inlet_velocity(oc_, Side::Cathode, params_.geometry, corr_);

    scales_.resize(size());
    for (int n = 0; n < N_; ++n)
        for (int k = 0; k < kVarsPerNode; ++k)
            scales_[CellState::index(n, static_cast<Var>(k))] = scale_of(static_cast<Var>(k));

    // node-local unknowns touch only their own node; the rest reach one node
    // further along the channel, so three colors suffice
    structure_.rows_of_column.resize(size());
    for (int n = 0; n < N_; ++n)
        for (int k = 0; k < kVarsPerNode; ++k) {
            const int lo = is_local(static_cast<Var>(k)) ? n : std::max(n - 1, 0);
            const int hi = is_local(static_cast<Var>(k)) ? n : std::min(n + 1, N_ - 1);
            auto& rows = structure_.rows_of_column[CellState::index(n, static_cast<Var>(k))];
            for (int m = lo; m <= hi; ++m)
                for (int q = 0; q < kVarsPerNode; ++q)
                    rows.push_back(static_cast<int>(CellState::index(m, static_cast<Var>(q))));
        }
    for (int k = 0; k < kVarsPerNode; ++k) {
        const int colors = is_local(static_cast<Var>(k)) ? 1 : 3;
        for (int c = 0; c < colors; ++c) {
            std::vector<int> group;
            for (int n = c; n < N_; n += colors)
                group.push_back(static_cast<int>(CellState::index(n, static_cast<Var>(k))));
            structure_.column_groups.push_back(std::move(group));
        }
    }
    scratch_.resize(N_);
}

bool FuelCellModel::is_differential(std::size_t i) const
{
    switch (static_cast<Var>(i % kVarsPerNode)) {
    case Var::cH2O_an: case Var::cH2_an: case Var::s_ch_an: case Var::cH2O_ca: case Var::cO2_ca:
    case Var::cN2_ca: case Var::s_ch_ca: case Var::lambda_an: case Var::lambda_ca:
    case Var::ccl_an: case Var::ccl_ca: case Var::scl_an: case Var::scl_ca:
        return true;
    default:
        return false;
    }
}

std::vector<std::string> FuelCellModel::block_names() const
{
    return {"channel_an", "channel_ca", "membrane", "cl_vapor", "cl_liquid", "kinetics", "plate"};
}

int FuelCellModel::block_of(std::size_t i) const
{
    const int k = static_cast<int>(i % kVarsPerNode);
    if (k <= static_cast<int>(Var::s_ch_an))
        return 0;
    if (k <= static_cast<int>(Var::s_ch_ca))
        return 1;
    switch (static_cast<Var>(k)) {
    case Var::lambda_an: case Var::lambda_ca: return 2;
    case Var::ccl_an: case Var::ccl_ca: return 3;
    case Var::scl_an: case Var::scl_ca: return 4;
    case Var::i_loc: case Var::phi_p_an: case Var::phi_p_ca: return 5;
    default: return 6;
    }
}

std::string FuelCellModel::describe(std::size_t i) const
{
    return std::string(to_string(static_cast<Var>(i % kVarsPerNode))) + "@" +
           std::to_string(i / kVarsPerNode);
}

int FuelCellModel::project(std::span<double> u) const
{
    int moved = 0;
    auto clamp = [&](double& x, double lo, double hi) {
        if (x < lo) {
            x = lo;
            ++moved;
        } else if (x > hi) {
            x = hi;
            ++moved;
        }
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int n = 0; n < N_; ++n) {
        double* p = u.data() + static_cast<std::size_t>(n) * kVarsPerNode;
        for (Var v : {Var::cH2O_an, Var::cH2_an, Var::cH2O_ca, Var::cO2_ca, Var::cN2_ca, Var::ccl_an,
                      Var::ccl_ca})
            clamp(p[static_cast<int>(v)], 0.0, inf);
        for (Var v : {Var::lambda_an, Var::lambda_ca})
            clamp(p[static_cast<int>(v)], 0.0, 22.0);
        for (Var v : {Var::s_ch_an, Var::s_ch_ca, Var::scl_an, Var::scl_ca})
            clamp(p[static_cast<int>(v)], 0.0, 0.99);
    }
    return moved;
}

double FuelCellModel::total_concentration(Side side, int node) const
{
    return side == Side::Anode ? C_an_[node] : C_ca_[node];
}

ChannelBoundary FuelCellModel::boundary(const CellState& s, int n) const
{
    ChannelBoundary b;
    b.T = profiles_.T[n];
    b.cH2O_an = s(n, Var::cH2O_an);
    b.cH2_an = s(n, Var::cH2_an);
    b.cH2O_ca = s(n, Var::cH2O_ca);
    b.cO2_ca = s(n, Var::cO2_ca);
    b.s_ch_an = s(n, Var::s_ch_an);
    b.s_ch_ca = s(n, Var::s_ch_ca);
    b.phi_ch = s(n, Var::phi_ch);
    return b;
}

ThroughCellUnknowns FuelCellModel::through_cell_unknowns(const CellState& s, int n)
{
    ThroughCellUnknowns u;
    u.lambda_an = s(n, Var::lambda_an);
    u.lambda_ca = s(n, Var::lambda_ca);
    u.ccl_an = s(n, Var::ccl_an);
    u.ccl_ca = s(n, Var::ccl_ca);
    u.scl_an = s(n, Var::scl_an);
    u.scl_ca = s(n, Var::scl_ca);
    u.i_loc = s(n, Var::i_loc);
    u.phi_p_an = s(n, Var::phi_p_an);
    u.phi_p_ca = s(n, Var::phi_p_ca);
    return u;
}

ThroughCellResult FuelCellModel::through_cell(const CellState& s, int n) const
{
    return through_cell_residual(through_cell_unknowns(s, n), boundary(s, n), beta(n),
                                 params_.geometry, corr_);
}

namespace {

struct SideLayout {
    Side side;
    std::vector<Var> species;
    std::vector<Gas> gases;
    Var v, s;
    double L;
};

} // namespace

ChannelResult FuelCellModel::channel_residual(const CellState& st,
                                              std::span<const CouplingFluxes> fluxes) const
{
    const auto& geom = params_.geometry;
    const double V_w = params_.material.V_w;
    ChannelResult out;
    out.rate.assign(size(), 0.0);
    const SideLayout sides[2] = {
        {Side::Anode, {Var::cH2O_an, Var::cH2_an}, {Gas::H2O, Gas::H2}, Var::v_an, Var::s_ch_an,
         geom.L_ch_an},
        {Side::Cathode, {Var::cH2O_ca, Var::cO2_ca, Var::cN2_ca}, {Gas::H2O, Gas::O2, Gas::N2},
         Var::v_ca, Var::s_ch_ca, geom.L_ch_ca}};
    for (const auto& sd : sides) {
        const bool an = sd.side == Side::Anode;
        const InletState& in = an ? inlet_an_ : inlet_ca_;
        const double v_in = an ? v_in_an_ : v_in_ca_;
        const double area_ratio = geom.L_ref() / sd.L;
        auto node = [&](int m) { return an ? N_ - 1 - m : m; };
        double* flow_in = an ? out.flows.in_an : out.flows.in_ca;
        double* flow_out = an ? out.flows.out_an : out.flows.out_ca;

        for (std::size_t k = 0; k < sd.species.size(); ++k) {
            const Var var = sd.species[k];
            const Gas gas = sd.gases[k];
            double F_up = v_in * in.c[g(gas)];
            flow_in[g(gas)] = F_up;
            for (int m = 0; m < N_; ++m) {
                const int n = node(m);
                const double v = st(n, sd.v);
                const double c = st(n, var);
                double F_down;
                if (m == N_ - 1) {
                    F_down = v * c;
                    flow_out[g(gas)] = F_down;
                } else {
                    const int nn = node(m + 1);
                    const double cn = st(nn, var);
                    const double Tf = 0.5 * (profiles_.T[n] + profiles_.T[nn]);
                    const double conv = v >= 0.0 ? v * c : v * cn;
                    F_down = conv - corr_.D_gas(gas, Tf) / sd.L * (cn - c) / dy_;
                }
                const double S = an ? fluxes[n].an[g(gas)] : fluxes[n].ca[g(gas)];
                out.rate[CellState::index(n, var)] =
                    -(F_down - F_up) / (sd.L * omega_[n]) + area_ratio * S / geom.h_ch;
                F_up = F_down;
            }
        }

        double G_up = 0.0;
        for (int m = 0; m < N_; ++m) {
            const int n = node(m);
            const double v = st(n, sd.v);
            double G_down;
            if (m == N_ - 1) {
                G_down = v * st(n, sd.s);
                (an ? out.flows.liquid_out_an : out.flows.liquid_out_ca) = G_down / V_w;
            } else {
                G_down = v >= 0.0 ? v * st(n, sd.s) : v * st(node(m + 1), sd.s);
            }
            const double S = an ? fluxes[n].liquid_an : fluxes[n].liquid_ca;
            out.rate[CellState::index(n, sd.s)] =
                -(G_down - G_up) / (sd.L * omega_[n]) + area_ratio * V_w * S / geom.h_ch;
            G_up = G_down;

            const double C = an ? C_an_[n] : C_ca_[n];
            out.rate[CellState::index(n, sd.v)] = (st.c_ch_total(sd.side, n) - C) / C;
        }
    }
    return out;
}

void FuelCellModel::rhs(std::span<const double> u, std::span<double> f) const
{
    // CellState copy keeps the accessors; the cost is small next to the physics
    CellState st(N_);
    std::copy(u.begin(), u.end(), st.values().begin());
    const auto& geom = params_.geometry;
    for (int n = 0; n < N_; ++n) {
        const auto r = through_cell(st, n);
        if (r.kinetics_saturated)
            ++saturations_;
        scratch_[n] = r.flux;
        double* fn = f.data() + static_cast<std::size_t>(n) * kVarsPerNode;
        fn[static_cast<int>(Var::lambda_an)] = r.dlambda_an;
        fn[static_cast<int>(Var::lambda_ca)] = r.dlambda_ca;
        fn[static_cast<int>(Var::ccl_an)] = r.dccl_an;
        fn[static_cast<int>(Var::ccl_ca)] = r.dccl_ca;
        fn[static_cast<int>(Var::scl_an)] = r.dscl_an;
        fn[static_cast<int>(Var::scl_ca)] = r.dscl_ca;
        fn[static_cast<int>(Var::i_loc)] = r.r_anode_kinetics;
        fn[static_cast<int>(Var::phi_p_an)] = r.r_cathode_kinetics;
        fn[static_cast<int>(Var::phi_p_ca)] = r.r_membrane_ohm;

        const double I_next = n + 1 < N_ ? st(n + 1, Var::I_plate) : 0.0;
        fn[static_cast<int>(Var::I_plate)] =
            (st(n, Var::I_plate) - I_next - omega_[n] * st(n, Var::i_loc)) / kCurrentScale;
        if (n == 0) {
            fn[static_cast<int>(Var::phi_ch)] = (st(0, Var::I_plate) - oc_.i_cell) / kCurrentScale;
        } else {
            const double R_seg = geom.L_ch_ca * geom.L_ch_ca * dy_ / params_.material.sigma_ch;
            fn[static_cast<int>(Var::phi_ch)] =
                (st(n, Var::phi_ch) - st(n - 1, Var::phi_ch) - R_seg * st(n, Var::I_plate)) /
                kPotentialScale;
        }
    }
    const auto ch = channel_residual(st, scratch_);
    for (int n = 0; n < N_; ++n)
        for (Var v : {Var::cH2O_an, Var::cH2_an, Var::v_an, Var::s_ch_an, Var::cH2O_ca, Var::cO2_ca,
                      Var::cN2_ca, Var::v_ca, Var::s_ch_ca}) {
            const auto i = CellState::index(n, v);
            f[i] = ch.rate[i];
        }
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            throw NonFiniteResidual(to_string(static_cast<Var>(i % kVarsPerNode)),
                                    static_cast<int>(i / kVarsPerNode));
}

BalanceReport balances(const FuelCellModel& model, const CellState& state)
{
    const int N = model.nodes();
    const auto& geom = model.parameters().geometry;
    const double F = model.correlations().constants().F;
    std::vector<CouplingFluxes> fl(N);
    double sum_H2 = 0.0;
    for (int n = 0; n < N; ++n) {
        fl[n] = model.through_cell(state, n).flux;
        sum_H2 += model.weights()[n] * fl[n].an[g(Gas::H2)];
    }
    const auto ch = model.channel_residual(state, fl);
    const auto& fw = ch.flows;
    BalanceReport b;
    b.hydrogen_in = fw.in_an[g(Gas::H2)];
    b.hydrogen_out = fw.out_an[g(Gas::H2)];
    b.hydrogen_consumed = -geom.L_ref() * sum_H2 / geom.h_ch;
    b.hydrogen_expected = geom.L_ref() * model.conditions().i_cell / (2.0 * F * geom.h_ch);
    b.hydrogen_rel_error =
        std::abs(b.hydrogen_in - b.hydrogen_out - b.hydrogen_consumed) / b.hydrogen_in;
    b.hydrogen_current_rel_error =
        b.hydrogen_expected > 0.0
            ? std::abs(b.hydrogen_in - b.hydrogen_out - b.hydrogen_expected) / b.hydrogen_expected
            : std::abs(b.hydrogen_in - b.hydrogen_out) / b.hydrogen_in;
    b.water_in = fw.in_an[g(Gas::H2O)] + fw.in_ca[g(Gas::H2O)];
    b.water_out = fw.out_an[g(Gas::H2O)] + fw.out_ca[g(Gas::H2O)] + fw.liquid_out_an +
                  fw.liquid_out_ca;
    b.water_produced = b.hydrogen_expected;
    b.water_rel_error =
        std::abs(b.water_in + b.water_produced - b.water_out) / (b.water_in + b.water_produced);
    for (int n = 0; n < N; ++n)
        for (Side s : {Side::Anode, Side::Cathode}) {
            const double C = model.total_concentration(s, n);
            b.ideal_gas_rel_error =
                std::max(b.ideal_gas_rel_error, std::abs(state.c_ch_total(s, n) - C) / C);
        }
    return b;
}

} // namespace fciiml
