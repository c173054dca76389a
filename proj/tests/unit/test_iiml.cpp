#include "helpers.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/eval.hpp"
#include "fciiml/features.hpp"
#include "fciiml/iiml.hpp"

#include <doctest.h>

#include <cmath>

using namespace fciiml;
using testing_support::nominal_baseline;
using testing_support::nominal_conditions;

namespace {

TrainingCase baseline_case()
{
    TrainingCase tc;
    tc.record.oc = nominal_conditions();
    tc.record.lambda_data = nominal_baseline().state.lambda_mb();
    tc.delta = AugmentationField::neutral(ModelParameters::defaults().geometry.N_y);
    tc.state = nominal_baseline().state;
    tc.cost = 0.0;
    tc.consistent = true;
    return tc;
}

MlpModel neutral_model()
{
    MlpModel m = MlpModel::initialize(1);
    for (int k = 0; k < 7; ++k)
        m.parameters()[MlpModel::weight_offset(2) + k] = 0.0;
    m.parameters()[MlpModel::bias_offset(2)] = 1.0;
    return m;
}

} // namespace

TEST_SUITE("iiml") {

TEST_CASE("finite-difference gradient on an injected objective")
{
    const std::vector<double> c{0.3, 1.2, -0.5, 2.0, 0.0};
    const FieldCost quad = [&c](const std::vector<double>& d) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            s += (d[i] - c[i]) * (d[i] - c[i]);
        return s;
    };
    const std::vector<double> delta{1.0, 1.0, 0.5, 0.8, 1.5};
    const double h = 1e-4;
    const auto gr = fd_gradient(quad, delta, quad(delta), h);
    REQUIRE(gr.g.size() == delta.size());
    CHECK(gr.evaluations == static_cast<long long>(delta.size()));
    for (std::size_t i = 0; i < delta.size(); ++i)
        CHECK(std::abs(gr.g[i] - 2.0 * (delta[i] - c[i])) <= 2.0 * h);

    SUBCASE("step halving halves the forward-difference error")
    {
        const FieldCost curved = [](const std::vector<double>& d) {
            double s = 0.0;
            for (double x : d)
                s += std::exp(x) + x * x * x;
            return s;
        };
        const double hh = 1e-3;
        const auto g1 = fd_gradient(curved, delta, curved(delta), hh);
        const auto g2 = fd_gradient(curved, delta, curved(delta), hh / 2.0);
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double exact = std::exp(delta[i]) + 3.0 * delta[i] * delta[i];
            const double ratio = (g1.g[i] - exact) / (g2.g[i] - exact);
            CHECK(ratio >= 1.7);
            CHECK(ratio <= 2.3);
        }
    }
    SUBCASE("failed evaluations retry with a smaller step, then zero the entry")
    {
        int calls = 0;
        const FieldCost flaky = [&](const std::vector<double>& d) {
            ++calls;
            if (d[1] > 1.0 + 5e-5)
                throw SolverDiverged(0, 0.0, "test");
            if (d[3] != 0.8)
                throw SolverDiverged(0, 0.0, "test");
            return quad(d);
        };
        const auto g = fd_gradient(flaky, delta, quad(delta), h);
        CHECK(g.g[1] == doctest::Approx(2.0 * (delta[1] - c[1])).epsilon(1e-3));
        CHECK(g.g[3] == 0.0);
        CHECK(g.zeroed == std::vector<int>{3});
    }
}

TEST_CASE("gradient at the data minimum")
{
    const ModelParameters p;
    IimlConfig cfg;
    const auto tc = baseline_case();
    const auto gr = fd_gradient(p, tc, cfg);
    double gmax = 0.0;
    for (double x : gr.g)
        gmax = std::max(gmax, std::abs(x));
    CHECK(gmax < 10.0 * cfg.fd_step);
    CHECK(gr.zeroed.empty());
    // what remains is forward-difference truncation, linear in h
    IimlConfig half = cfg;
    half.fd_step = 0.5 * cfg.fd_step;
    const auto g2 = fd_gradient(p, tc, half);
    double gmax2 = 0.0;
    for (double x : g2.g)
        gmax2 = std::max(gmax2, std::abs(x));
    CHECK(gmax / gmax2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("field inversion update")
{
    const std::vector<double> d{1.0, 1.0, 0.02, 1.0};
    const std::vector<double> g{0.5, -0.25, 0.4, 0.0};
    const auto nd = field_inversion_update(d, g, 0.05);
    CHECK(nd[0] == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(nd[1] == doctest::Approx(1.025).epsilon(1e-14));
    CHECK(nd[2] == 0.0);
    CHECK(nd[3] == 1.0);
    bool stationary = false;
    CHECK(field_inversion_update(d, std::vector<double>(4, 0.0), 0.05, &stationary) == d);
    CHECK(stationary);

    const std::vector<double> c{0.6, 1.4, 0.9, 1.1};
    auto C = [&c](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += (x[i] - c[i]) * (x[i] - c[i]);
        return s;
    };
    std::vector<double> x(4, 1.0);
    for (int k = 0; k < 2; ++k) {
        std::vector<double> gr(4);
        for (int i = 0; i < 4; ++i)
            gr[i] = 2.0 * (x[i] - c[i]);
        const auto nx = field_inversion_update(x, gr, 0.05);
        CHECK(C(nx) < C(x));
        x = nx;
    }
}

TEST_CASE("network synchronization and field correction")
{
    const ModelParameters p;
    IimlConfig cfg;
    std::vector<TrainingCase> cases{baseline_case()};

    SUBCASE("unit targets keep a unit network")
    {
        MlpModel m = neutral_model();
        const std::vector<std::vector<double>> targets{cases[0].delta.values()};
        const double loss = ml_sync(cases, targets, m, cfg, p);
        CHECK(loss < 1e-3);
        const FuelCellModel fm(p, cases[0].record.oc);
        for (double v : m.predict(compute_features(fm, cases[0].state)))
            CHECK(std::abs(v - 1.0) < 1e-2);
    }
    SUBCASE("neutral network keeps the baseline")
    {
        const auto traces = field_correction(p, cases, neutral_model(), cfg);
        REQUIRE(traces.size() == 1);
        CHECK(cases[0].delta.values() == std::vector<double>(p.geometry.N_y, 1.0));
        CHECK(cases[0].state.values().size() == nominal_baseline().state.values().size());
        const auto lm = cases[0].state.lambda_mb();
        const auto lb = nominal_baseline().state.lambda_mb();
        for (std::size_t n = 0; n < lm.size(); ++n)
            CHECK(lm[n] == doctest::Approx(lb[n]).epsilon(1e-7));
        CHECK(std::isfinite(cases[0].cost));
        CHECK(cases[0].consistent);
    }
}

TEST_CASE("training stops at once when the data needs no augmentation")
{
    const ModelParameters p;
    IimlConfig cfg;
    const auto tc = baseline_case();
    const auto res = run_wciiml(p, {tc.record}, cfg);
    CHECK(res.history.J_baseline <= cfg.objective_tol);
    CHECK(res.history.iterations.size() == 1);
    CHECK(res.history.iterations[0].fd_solves == 0);
    CHECK(res.history.iterations[0].accepted);
    const FuelCellModel fm(p, tc.record.oc);
    for (double v : res.model.predict(compute_features(fm, res.cases.at(0).state)))
        CHECK(std::abs(v - 1.0) < 1e-2);
}

TEST_CASE("configuration")
{
    IimlConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    const auto kv = cfg.to_keyvalue();
    for (const char* key : {"fd_step", "step_scale", "max_outer", "ml_epochs", "learning_rate",
                            "reject_factor", "objective_tol", "seed", "workers", "fp_rho", "fp_tol",
                            "fp_max_iter", "fp_oscillation_window", "fp_oscillation_bound",
                            "dt_initial", "dt_max", "t_final", "newton_tol", "steady_tol",
                            "newton_max_iter", "max_halvings"})
        CHECK_MESSAGE(kv.has(key), key);
    const auto back = IimlConfig::from_keyvalue(kv);
    CHECK(back.to_keyvalue().to_string() == kv.to_string());

    CHECK_THROWS_AS(IimlConfig::from_keyvalue(KeyValueFile::parse("bogus = 1")), ConfigError);
    CHECK_THROWS_AS(IimlConfig::from_keyvalue(KeyValueFile::parse("fd_step = -1")), ConfigError);
    CHECK_THROWS_AS(IimlConfig::from_keyvalue(KeyValueFile::parse("fp_rho = 1")), ConfigError);
    CHECK(IimlConfig::from_keyvalue(KeyValueFile::parse("max_outer = 7")).max_outer == 7);
}

} // TEST_SUITE
