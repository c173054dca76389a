#include "fciiml/features.hpp"

#include "fciiml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fciiml {

const char* to_string(Feature f)
{
    static constexpr std::array<const char*, kFeatureCount> names{
        "x_H2O_ch_an", "T_ch_ca", "x_H2O_ch_ca", "lambda_cl_an",
        "c_H2O_cl_an", "lambda_cl_ca", "c_H2O_cl_ca", "lambda_mb"};
    const int k = static_cast<int>(f);
    return (k >= 0 && k < kFeatureCount) ? names[k] : "?";
}

FeatureMatrix compute_features(const FuelCellModel& model, const CellState& s)
{
    const int N = s.nodes();
    FeatureMatrix m;
    m.rows = N;
    m.values.resize(static_cast<std::size_t>(N) * kFeatureCount);
    for (int n = 0; n < N; ++n) {
        const double tot_an = s.c_ch_total(Side::Anode, n);
        const double tot_ca = s.c_ch_total(Side::Cathode, n);
        m(n, 0) = tot_an > 0.0 ? s(n, Var::cH2O_an) / tot_an : 0.0;
        m(n, 1) = model.profiles().T[n];
        m(n, 2) = tot_ca > 0.0 ? s(n, Var::cH2O_ca) / tot_ca : 0.0;
        m(n, 3) = s(n, Var::lambda_an);
        m(n, 4) = s(n, Var::ccl_an);
        m(n, 5) = s(n, Var::lambda_ca);
        m(n, 6) = s(n, Var::ccl_ca);
        m(n, 7) = s.lambda_mb(n);
        for (int c = 0; c < kFeatureCount; ++c)
            if (!std::isfinite(m(n, c)))
                throw NonFiniteResidual(std::string("feature ") + to_string(static_cast<Feature>(c)), n);
    }
    return m;
}

NormalizationBounds fit_bounds(const std::vector<FeatureMatrix>& matrices, std::vector<int>* degenerate)
{
    if (matrices.empty())
        throw DomainError("fit_bounds needs at least one feature matrix");
    NormalizationBounds b;
    b.lo.fill(std::numeric_limits<double>::infinity());
    b.hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& m : matrices)
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < kFeatureCount; ++c) {
                b.lo[c] = std::min(b.lo[c], m(r, c));
                b.hi[c] = std::max(b.hi[c], m(r, c));
            }
    if (!std::isfinite(b.lo[0]))
        throw DomainError("fit_bounds: feature matrices have no rows");
    if (degenerate)
        degenerate->clear();
    for (int c = 0; c < kFeatureCount; ++c) {
        const double span = b.hi[c] - b.lo[c];
        if (span > 0.0) {
            b.lo[c] -= kBoundsMargin * span;
            b.hi[c] += kBoundsMargin * span;
        } else {
            b.lo[c] -= 0.5;
            b.hi[c] += 0.5;
            if (degenerate)
                degenerate->push_back(c);
        }
    }
    return b;
}

FeatureMatrix apply_bounds(const FeatureMatrix& m, const NormalizationBounds& b, long long* clamped)
{
    FeatureMatrix out = m;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < kFeatureCount; ++c) {
            double x = (m(r, c) - b.lo[c]) / (b.hi[c] - b.lo[c]);
            if (x < kScaledMin || x > kScaledMax) {
                x = std::clamp(x, kScaledMin, kScaledMax);
                if (clamped)
                    ++*clamped;
            }
            out(r, c) = x;
        }
    return out;
}

FeatureMatrix invert_bounds(const FeatureMatrix& scaled, const NormalizationBounds& b)
{
    FeatureMatrix out = scaled;
    for (int r = 0; r < scaled.rows; ++r)
        for (int c = 0; c < kFeatureCount; ++c)
            out(r, c) = b.lo[c] + scaled(r, c) * (b.hi[c] - b.lo[c]);
    return out;
}

} // namespace fciiml
