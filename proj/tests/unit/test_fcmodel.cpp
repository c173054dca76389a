#include "helpers.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/model.hpp"
#include "fciiml/source_terms.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace fciiml;
using testing_support::nominal_baseline;
using testing_support::nominal_conditions;

TEST_SUITE("fcmodel") {

TEST_CASE("equilibrium water content endpoints and monotonicity")
{
    const Correlations corr(ModelParameters::defaults());
    CHECK(corr.lambda_eq(303.15, 0.0) == doctest::Approx(0.043).epsilon(1e-12));
    CHECK(corr.lambda_eq(303.15, 1.0) == doctest::Approx(14.003).epsilon(1e-12));
    for (double T = 280.0; T <= 370.0; T += 5.0) {
        CHECK(corr.lambda_eq(T, 0.8) <= corr.lambda_eq(T, 0.9));
        double prev = -1.0;
        for (double rh = 0.0; rh <= 1.5; rh += 0.01) {
            const double v = corr.lambda_eq(T, rh);
            CHECK(std::isfinite(v));
            CHECK(v >= prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(corr.lambda_eq(400.0, 0.5), DomainError);
    CHECK_THROWS_AS(corr.lambda_eq(250.0, 0.5), DomainError);
}

TEST_CASE("augmented adsorption source")
{
    CellGeometry geom;
    MaterialParameters mat;
    geom.h_cl = 1.0;
    mat.V_m = 1.0;
    mat.k_ad = 2.0;
    CHECK(augmented_adsorption_source(9.0, 10.0, 1.1, geom, mat) == doctest::Approx(4.0));
    CHECK(augmented_adsorption_source(7.5, 7.5, 1.0, geom, mat) == 0.0);

    const CellGeometry g0;
    const MaterialParameters m0;
    for (double lam : {0.5, 4.0, 13.0})
        for (double leq : {1.0, 9.0, 14.0}) {
            const double base = m0.k_ad / (g0.h_cl * m0.V_m) * (leq - lam);
            CHECK(augmented_adsorption_source(lam, leq, 1.0, g0, m0) == base);
        }
}

TEST_CASE("Butler-Volmer kinetics")
{
    const PhysicalConstants pc;
    const double T = 353.15;
    const auto r = butler_volmer_kinetics(1.0, 0.05, T, 0.5, pc);
    const double oracle = 2.0 * std::sinh(96485.33 * 0.05 / (8.314 * T));
    CHECK(r.j == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(r.j == doctest::Approx(4.97).epsilon(2e-3));
    CHECK_FALSE(r.saturated);
    CHECK(butler_volmer_kinetics(3.0, 0.0, T, 0.5, pc).j == 0.0);
    for (double eta : {0.01, 0.1, 0.3})
        CHECK(butler_volmer_kinetics(2.0, eta, T, 0.5, pc).j ==
              doctest::Approx(-butler_volmer_kinetics(2.0, -eta, T, 0.5, pc).j));
    const auto sat = butler_volmer_kinetics(1.0, 5.0, T, 0.5, pc);
    CHECK(sat.saturated);
    CHECK(std::isfinite(sat.j));
}

TEST_CASE("reaction rates")
{
    CellGeometry geom;
    geom.a = 1.0e5;
    const PhysicalConstants pc;
    const auto r = reaction_rates(1.0, -1.0, geom, pc);
    CHECK(std::abs(r.r_H2) == doctest::Approx(0.5182).epsilon(1e-4));
    CHECK(std::abs(r.r_H2) == doctest::Approx(2.0 * std::abs(r.r_O2)));
    CHECK(r.r_H2 < 0.0);
    CHECK(r.r_O2 < 0.0);
    CHECK(r.r_H2O > 0.0);
    const auto z = reaction_rates(0.0, 0.0, geom, pc);
    CHECK(z.r_H2 == 0.0);
    CHECK(z.r_O2 == 0.0);
    CHECK(z.r_H2O == 0.0);
}

TEST_CASE("evaporation and condensation source")
{
    CHECK(evap_cond_source(10.2, 10.0, 0.25, 50.0, 100.0) == doctest::Approx(15.0));
    CHECK(evap_cond_source(10.0, 10.0, 0.25, 50.0, 100.0) == 0.0);
    const ModelParameters p;
    const Correlations corr(p);
    const double T = 343.15;
    const double cs = corr.c_sat(T);
    CHECK(evap_cond_source(cs, T, 0.5, corr) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(evap_cond_source(0.5 * cs, T, p.material.s_im, corr) == 0.0);
    CHECK(evap_cond_source(0.5 * cs, T, 0.5 * p.material.s_im, corr) == 0.0);
    CHECK(evap_cond_source(0.5 * cs, T, 0.6, corr) < 0.0);
    CHECK(evap_cond_source(1.5 * cs, T, 0.05, corr) > 0.0);
}

TEST_CASE("channel temperature and pressure profiles")
{
    OperatingConditions oc;
    oc.T_in = 343.0;
    oc.dT = 10.0;
    const auto pr = channel_profiles(oc, {0.0, 0.25, 1.0});
    CHECK(pr.T[1] == doctest::Approx(350.5));
    CHECK(pr.T[2] == oc.T_in);
    CHECK(pr.p_an[2] == oc.p_in_an);
    CHECK(pr.p_an[0] == doctest::Approx(oc.p_in_an + oc.dp_an));
    CHECK(pr.p_ca[0] == oc.p_in_ca);
    CHECK(pr.p_ca[2] == doctest::Approx(oc.p_in_ca + oc.dp_ca));
    oc.dT = 0.0;
    for (double T : channel_profiles(oc, uniform_grid(11)).T)
        CHECK(T == oc.T_in);
}

namespace {

// Fully equilibrated node at zero current.
struct EquilibriumNode {
    ThroughCellUnknowns u;
    ChannelBoundary ch;
};

EquilibriumNode equilibrium_node(const Correlations& corr, double T, double RH)
{
    EquilibriumNode e;
    const double R = corr.constants().R;
    const double c_w = RH * corr.p_sat(T) / (R * T);
    e.ch.T = T;
    e.ch.cH2O_an = e.ch.cH2O_ca = c_w;
    e.ch.cH2_an = 30.0;
    e.ch.cO2_ca = 7.0;
    const double lam = corr.lambda_eq(T, RH);
    e.u.lambda_an = e.u.lambda_ca = lam;
    e.u.ccl_an = e.u.ccl_ca = c_w;
    e.u.scl_an = e.u.scl_ca = 0.5 * corr.material().s_im;
    const double c_h2 = 0.5 * (30.0 + std::sqrt(30.0 * 30.0 + 1e-6));
    const double c_o2 = 0.5 * (7.0 + std::sqrt(7.0 * 7.0 + 1e-6));
    const double U_an = corr.U(Side::Anode, c_h2, T);
    const double U_ca = corr.U(Side::Cathode, c_o2, T);
    e.u.phi_p_an = e.u.phi_p_ca = -U_an;
    e.ch.phi_ch = U_ca - U_an;
    return e;
}

} // namespace

TEST_CASE("through-cell residual vanishes at full equilibrium")
{
    const ModelParameters p;
    const Correlations corr(p);
    const auto e = equilibrium_node(corr, 343.15, 0.7);
    const auto r = through_cell_residual(e.u, e.ch, 1.0, p.geometry, corr);
    CHECK(std::abs(r.dlambda_an) < 1e-12);
    CHECK(std::abs(r.dlambda_ca) < 1e-12);
    CHECK(std::abs(r.dccl_an) < 1e-9);
    CHECK(std::abs(r.dccl_ca) < 1e-9);
    CHECK(std::abs(r.dscl_an) < 1e-15);
    CHECK(std::abs(r.dscl_ca) < 1e-15);
    CHECK(std::abs(r.r_anode_kinetics) < 1e-9);
    CHECK(std::abs(r.r_cathode_kinetics) < 1e-9);
    CHECK(std::abs(r.r_membrane_ohm) < 1e-15);

    SUBCASE("raising lambda above equilibrium drives desorption")
    {
        for (double eps : {1e-3, 1e-2, 0.1}) {
            auto u = e.u;
            u.lambda_an += eps;
            u.lambda_ca += eps;
            const auto rp = through_cell_residual(u, e.ch, 1.0, p.geometry, corr);
            CHECK(rp.dlambda_mb() < 0.0);
            u.lambda_an -= 2.0 * eps;
            u.lambda_ca -= 2.0 * eps;
            const auto rm = through_cell_residual(u, e.ch, 1.0, p.geometry, corr);
            CHECK(rm.dlambda_mb() > 0.0);
        }
    }
}

TEST_CASE("neutral augmentation reproduces the baseline right-hand side")
{
    const ModelParameters p;
    const auto oc = nominal_conditions();
    const FuelCellModel base(p, oc);
    const std::vector<double> ones(p.geometry.N_y, 1.0);
    const FuelCellModel aug(p, oc, ones);
    const auto& u = nominal_baseline().state.values();
    std::vector<double> f0(base.size()), f1(base.size());
    base.rhs(u, f0);
    aug.rhs(u, f1);
    CHECK(f0 == f1);
    const std::vector<double> wrong(p.geometry.N_y - 1, 1.0);
    CHECK_THROWS_AS(FuelCellModel(p, oc, wrong), DomainError);
}

TEST_CASE("channel residual")
{
    const ModelParameters p;
    const auto oc = nominal_conditions();
    const FuelCellModel m(p, oc);
    const int N = m.nodes();
    const auto& geom = p.geometry;

    SUBCASE("discrete conservation telescopes to inlet minus outlet plus sources")
    {
        CellState s = nominal_baseline().state;
        // perturb off steady state so that every term is nonzero
        for (int n = 0; n < N; ++n) {
            s(n, Var::cO2_ca) *= 1.0 + 0.01 * std::sin(1.3 * n);
            s(n, Var::v_ca) *= 1.0 + 0.02 * std::cos(0.7 * n);
            s(n, Var::cH2_an) *= 1.0 - 0.01 * std::sin(0.4 * n);
        }
        std::vector<CouplingFluxes> flux(N);
        for (int n = 0; n < N; ++n)
            flux[n] = m.through_cell(s, n).flux;
        const auto r0 = m.channel_residual(s, flux);
        const auto& w = m.weights();
        auto total = [&](const ChannelResult& r, Var v, double L) {
            double acc = 0.0;
            for (int n = 0; n < N; ++n)
                acc += L * w[n] * r.rate[CellState::index(n, v)];
            return acc;
        };
        const int o2 = static_cast<int>(Gas::O2);
        const int h2 = static_cast<int>(Gas::H2);
        double src_o2 = 0.0, src_h2 = 0.0;
        for (int n = 0; n < N; ++n) {
            src_o2 += geom.L_ref() * w[n] * flux[n].ca[o2] / geom.h_ch;
            src_h2 += geom.L_ref() * w[n] * flux[n].an[h2] / geom.h_ch;
        }
        const double lhs_o2 = total(r0, Var::cO2_ca, geom.L_ch_ca);
        const double rhs_o2 = r0.flows.in_ca[o2] - r0.flows.out_ca[o2] + src_o2;
        CHECK(lhs_o2 == doctest::Approx(rhs_o2).epsilon(1e-10).scale(r0.flows.in_ca[o2]));
        const double lhs_h2 = total(r0, Var::cH2_an, geom.L_ch_an);
        const double rhs_h2 = r0.flows.in_an[h2] - r0.flows.out_an[h2] + src_h2;
        CHECK(lhs_h2 == doctest::Approx(rhs_h2).epsilon(1e-10).scale(r0.flows.in_an[h2]));

        // a source injected at one node changes the net outflow by exactly L_ref w S / h_ch
        const int k = 7;
        const double S = 3.0e-3;
        auto flux2 = flux;
        flux2[k].ca[o2] += S;
        const auto r1 = m.channel_residual(s, flux2);
        const double delta = total(r1, Var::cO2_ca, geom.L_ch_ca) - lhs_o2;
        CHECK(delta == doctest::Approx(geom.L_ref() * w[k] * S / geom.h_ch).epsilon(1e-9));
    }

    SUBCASE("uniform state without sources or flow has zero interior rates")
    {
        CellState s = nominal_baseline().state;
        for (int n = 0; n < N; ++n) {
            s(n, Var::cH2O_ca) = 5.0;
            s(n, Var::cO2_ca) = 8.0;
            s(n, Var::cN2_ca) = 30.0;
            s(n, Var::v_ca) = 0.0;
            s(n, Var::s_ch_ca) = 0.0;
        }
        const std::vector<CouplingFluxes> zero(N);
        const auto r = m.channel_residual(s, zero);
        for (int n = 1; n < N - 1; ++n) {
            CHECK(r.rate[CellState::index(n, Var::cO2_ca)] == 0.0);
            CHECK(r.rate[CellState::index(n, Var::cN2_ca)] == 0.0);
            CHECK(r.rate[CellState::index(n, Var::s_ch_ca)] == 0.0);
        }
    }

    SUBCASE("velocity rows enforce the ideal-gas total")
    {
        const auto& s = nominal_baseline().state;
        const std::vector<CouplingFluxes> zero(N);
        const auto r = m.channel_residual(s, zero);
        for (int n = 0; n < N; ++n) {
            CHECK(std::abs(r.rate[CellState::index(n, Var::v_an)]) < 1e-6);
            CHECK(std::abs(r.rate[CellState::index(n, Var::v_ca)]) < 1e-6);
        }
    }
}

TEST_CASE("non-finite state is reported with field and node")
{
    const ModelParameters p;
    const FuelCellModel m(p, nominal_conditions());
    CellState s = nominal_baseline().state;
    s(4, Var::lambda_an) = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> f(m.size());
    CHECK_THROWS_AS(m.rhs(s.values(), f), NonFiniteResidual);
}

TEST_CASE("initial condition")
{
    const ModelParameters p;
    OperatingConditions oc = nominal_conditions();
    oc.RH_an_in = oc.RH_ca_in = 0.8;
    oc.dT = 0.0;
    const FuelCellModel m(p, oc);
    const auto s = initial_condition(m);
    const Correlations& corr = m.correlations();
    const double lam = corr.lambda_eq(oc.T_in, 0.8);
    for (int n = 0; n < m.nodes(); ++n) {
        CHECK(s(n, Var::lambda_an) == doctest::Approx(lam).epsilon(1e-14));
        CHECK(s(n, Var::lambda_ca) == doctest::Approx(lam).epsilon(1e-14));
    }
    const double R = p.constants.R;
    const int an_in = m.nodes() - 1;
    const double c_w = 0.8 * corr.p_sat(oc.T_in) / (R * oc.T_in);
    CHECK(s(an_in, Var::cH2O_an) == doctest::Approx(c_w).epsilon(1e-12));
    CHECK(s(0, Var::cH2O_ca) == doctest::Approx(c_w).epsilon(1e-12));
    CHECK(s.c_ch_total(Side::Anode, an_in) == doctest::Approx(oc.p_in_an / (R * oc.T_in)).epsilon(1e-12));
    CHECK(s.c_ch_total(Side::Cathode, 0) == doctest::Approx(oc.p_in_ca / (R * oc.T_in)).epsilon(1e-12));
}

TEST_CASE("nominal steady solve: convergence, conservation, residual decay")
{
    const ModelParameters p;
    const FuelCellModel m(p, nominal_conditions());
    const auto& sol = nominal_baseline();
    REQUIRE(sol.report.converged);
    const auto b = balances(m, sol.state);
    CHECK(b.hydrogen_rel_error < 1e-6);
    CHECK(b.hydrogen_current_rel_error < 1e-6);
    CHECK(b.water_rel_error < 1e-5);
    CHECK(b.ideal_gas_rel_error < 1e-6);

    const auto& h = sol.report.history;
    REQUIRE(h.size() >= 2);
    const double first = *std::max_element(h.front().block_norms.begin(), h.front().block_norms.end());
    const double last = *std::max_element(h.back().block_norms.begin(), h.back().block_norms.end());
    CHECK(last < 1e-6 * first);

    for (int n = 0; n < m.nodes(); ++n) {
        CHECK(sol.state(n, Var::lambda_an) >= 0.0);
        CHECK(sol.state(n, Var::s_ch_ca) >= 0.0);
        CHECK(sol.state(n, Var::cO2_ca) >= 0.0);
        CHECK(sol.state(n, Var::i_loc) > 0.0);
    }
    double mean_i = 0.0;
    for (int n = 0; n < m.nodes(); ++n)
        mean_i += m.weights()[n] * sol.state(n, Var::i_loc);
    CHECK(mean_i == doctest::Approx(nominal_conditions().i_cell).epsilon(1e-8));
}

TEST_CASE("equilibrium operating point is already steady")
{
    const ModelParameters p;
    OperatingConditions oc;
    oc.i_cell = 0.0;
    oc.dT = 0.0;
    oc.dp_an = oc.dp_ca = 0.0;
    oc.RH_an_in = oc.RH_ca_in = 0.5;
    const FuelCellModel m(p, oc);
    const auto s0 = initial_condition(m);
    const auto sol = solve_steady(m, SolverSettings{});
    REQUIRE(sol.report.converged);
    const auto sc = m.scales();
    double d = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        d = std::max(d, std::abs(sol.state.values()[i] - s0.values()[i]) / sc[i]);
    CHECK(d <= SolverSettings{}.newton_tol);
}

} // TEST_SUITE
