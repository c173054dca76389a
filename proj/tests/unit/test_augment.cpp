#include "helpers.hpp"

#include "fciiml/augment.hpp"
#include "fciiml/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fciiml;
using testing_support::nominal_baseline;
using testing_support::nominal_conditions;

namespace {

AugmentationFunction constant_aug(double c)
{
    return [c](const FuelCellModel& m, const CellState&) { return std::vector<double>(m.nodes(), c); };
}

// smooth, state-dependent correction
AugmentationFunction smooth_aug()
{
    return [](const FuelCellModel&, const CellState& s) {
        std::vector<double> b(s.nodes());
        for (int n = 0; n < s.nodes(); ++n)
            b[n] = 0.8 + 0.4 / (1.0 + std::exp(-2.0 * (s.lambda_mb(n) - 8.0)));
        return b;
    };
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_SUITE("augment") {

TEST_CASE("R_aug is the Euclidean distance")
{
    std::vector<double> a(20, 0.3), b(20, 0.3);
    CHECK(compute_R_aug(a, b) == 0.0);
    b[0] += 3.0;
    b[1] += 4.0;
    CHECK(compute_R_aug(b, a) == doctest::Approx(5.0).epsilon(1e-14));
    std::mt19937_64 g(3);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(20), y(20);
        double ss = 0.0;
        for (int i = 0; i < 20; ++i) {
            x[i] = nd(g);
            y[i] = nd(g);
            ss += (x[i] - y[i]) * (x[i] - y[i]);
        }
        CHECK(compute_R_aug(x, y) == doctest::Approx(std::sqrt(ss)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(compute_R_aug(std::vector<double>(3), std::vector<double>(4)), DomainError);
}

TEST_CASE("augmentation field validation")
{
    CHECK_THROWS_AS(AugmentationField({1.0, -0.1}), DomainError);
    CHECK_THROWS_AS(AugmentationField({1.0, std::nan("")}), DomainError);
    CHECK(AugmentationField::neutral(5).values() == std::vector<double>(5, 1.0));
}

TEST_CASE("frozen-field solves")
{
    const ModelParameters p;
    const auto oc = nominal_conditions();
    const auto& base = nominal_baseline();
    const int N = p.geometry.N_y;

    SUBCASE("neutral field matches the baseline")
    {
        const auto s = solve_with_field(p, oc, AugmentationField::neutral(N), SolverSettings{});
        CHECK(s.state.values().size() == base.state.values().size());
        CHECK(max_diff({s.state.values().begin(), s.state.values().end()},
                       {base.state.values().begin(), base.state.values().end()}) == 0.0);
    }
    SUBCASE("zero field dries the membrane everywhere")
    {
        const auto s = solve_with_field(p, oc, AugmentationField(std::vector<double>(N, 0.0)),
                                        SolverSettings{}, &base.state);
        REQUIRE(s.report.converged);
        for (int n = 0; n < N; ++n)
            CHECK(s.state.lambda_mb(n) < base.state.lambda_mb(n));
    }
    SUBCASE("raising the field at one node raises lambda there")
    {
        for (int n : {0, 9, 19}) {
            std::vector<double> d(N, 1.0);
            d[n] += 1e-3;
            const auto s = solve_with_field(p, oc, AugmentationField(d), SolverSettings{}, &base.state);
            REQUIRE(s.report.converged);
            CHECK(s.state.lambda_mb(n) > base.state.lambda_mb(n));
        }
    }
}

TEST_CASE("fixed-point solve")
{
    const ModelParameters p;
    const auto oc = nominal_conditions();
    const FixedPointSettings fp;
    const SolverSettings ss;

    SUBCASE("unit augmentation converges at once")
    {
        const auto r = fixed_point_solve(p, oc, constant_aug(1.0), fp, ss);
        CHECK(r.trace.converged);
        CHECK(r.trace.iterations == 1);
        CHECK(r.trace.R_aug_history.at(0) == 0.0);
        CHECK(r.delta.values() == std::vector<double>(p.geometry.N_y, 1.0));
    }
    SUBCASE("constant augmentation contracts with ratio rho")
    {
        const auto r = fixed_point_solve(p, oc, constant_aug(0.9), fp, ss);
        REQUIRE(r.trace.converged);
        const auto& h = r.trace.R_aug_history;
        REQUIRE(h.size() >= 3);
        for (std::size_t i = 1; i < h.size(); ++i)
            CHECK(h[i] / h[i - 1] == doctest::Approx(fp.rho).epsilon(1e-9));
        for (double d : r.delta.values())
            CHECK(std::abs(d - 0.9) <= fp.tol);
    }
    SUBCASE("state-dependent augmentation: consistency, idempotence, relaxation neutrality")
    {
        const auto aug = smooth_aug();
        const auto r = fixed_point_solve(p, oc, aug, fp, ss);
        REQUIRE(r.trace.converged);
        const FuelCellModel m(p, oc, r.delta.values());
        const auto pred = aug(m, r.state);
        CHECK(max_diff(r.delta.values(), pred) <= 2.0 * fp.tol / (1.0 - fp.rho));

        const auto again = fixed_point_solve(p, oc, aug, fp, ss, &r.state, &r.delta);
        CHECK(again.trace.converged);
        CHECK(again.trace.iterations <= 2);

        FixedPointSettings fp2 = fp;
        fp2.rho = 0.3;
        const auto r2 = fixed_point_solve(p, oc, aug, fp2, ss);
        REQUIRE(r2.trace.converged);
        CHECK(max_diff(r.delta.values(), r2.delta.values()) <= 10.0 * fp.tol);

        // inner solves get cheaper as the field settles
        const auto& nps = r.trace.newton_per_solve;
        int non_increasing = 0;
        for (std::size_t i = 1; i < nps.size(); ++i)
            non_increasing += nps[i] <= nps[i - 1] ? 1 : 0;
        REQUIRE(nps.size() >= 2);
        CHECK(non_increasing >= 0.8 * static_cast<double>(nps.size() - 1));
    }
    SUBCASE("a diverging sequence is reported with its trace")
    {
        FixedPointSettings tight = fp;
        tight.max_iter = 3;
        tight.tol = 1e-12;
        // alternates between two far-apart values
        int calls = 0;
        const AugmentationFunction flip = [&calls](const FuelCellModel& m, const CellState&) {
            ++calls;
            return std::vector<double>(m.nodes(), calls % 2 ? 3.0 : 0.2);
        };
        try {
            fixed_point_solve(p, oc, flip, tight, ss);
            FAIL("expected NotConverged");
        } catch (const NotConverged& e) {
            CHECK(e.trace().iterations == 3);
            CHECK_FALSE(e.trace().converged);
        }
    }
}

} // TEST_SUITE
