#include "helpers.hpp"

#include "fciiml/features.hpp"

#include <doctest.h>

#include <random>

using namespace fciiml;
using testing_support::nominal_baseline;
using testing_support::nominal_conditions;

TEST_SUITE("features") {

TEST_CASE("feature columns")
{
    const ModelParameters p;
    OperatingConditions oc = nominal_conditions();
    const FuelCellModel m(p, oc);
    CellState s = nominal_baseline().state;
    s(4, Var::cH2_an) = 0.0;
    const auto f = compute_features(m, s);
    REQUIRE(f.rows == m.nodes());
    CHECK(f(4, static_cast<int>(Feature::x_H2O_ch_an)) == 1.0);
    for (int n = 0; n < m.nodes(); ++n) {
        CHECK(f(n, static_cast<int>(Feature::lambda_mb)) == s.lambda_mb(n));
        CHECK(f(n, static_cast<int>(Feature::lambda_cl_an)) == s(n, Var::lambda_an));
        CHECK(f(n, static_cast<int>(Feature::c_H2O_cl_ca)) == s(n, Var::ccl_ca));
        CHECK(f(n, static_cast<int>(Feature::T_ch_ca)) == m.profiles().T[n]);
    }

    oc.dT = 0.0;
    const FuelCellModel flat(p, oc);
    const auto g = compute_features(flat, nominal_baseline().state);
    for (int n = 0; n < flat.nodes(); ++n)
        CHECK(g(n, static_cast<int>(Feature::T_ch_ca)) == oc.T_in);
}

TEST_CASE("normalization bounds")
{
    FeatureMatrix m;
    m.rows = 3;
    m.values.assign(3 * kFeatureCount, 0.0);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < kFeatureCount; ++c)
            m(r, c) = 10.0 * c + r;
        m(r, 0) = 2.0 + r;   // range [2, 4]
        m(r, 6) = 7.0;       // constant
    }
    std::vector<int> degenerate;
    const auto b = fit_bounds({m}, &degenerate);
    CHECK(b.lo[0] == doctest::Approx(1.9));
    CHECK(b.hi[0] == doctest::Approx(4.1));
    CHECK(b.lo[6] == doctest::Approx(6.5));
    CHECK(b.hi[6] == doctest::Approx(7.5));
    CHECK(degenerate == std::vector<int>{6});

    long long clamped = 0;
    const auto scaled = apply_bounds(m, b, &clamped);
    CHECK(clamped == 0);
    for (double v : scaled.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureMatrix x = m;
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < kFeatureCount; ++c)
            x(r, c) = b.lo[c] + u(gen) * (b.hi[c] - b.lo[c]);
    const auto back = invert_bounds(apply_bounds(x, b), b);
    for (std::size_t i = 0; i < x.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(x.values[i]).epsilon(1e-14));

    FeatureMatrix far = m;
    far(0, 0) = 100.0;
    far(1, 0) = -100.0;
    clamped = 0;
    const auto sc = apply_bounds(far, b, &clamped);
    CHECK(clamped == 2);
    CHECK(sc(0, 0) == kScaledMax);
    CHECK(sc(1, 0) == kScaledMin);
}

} // TEST_SUITE
