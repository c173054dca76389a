#pragma once

#include "fciiml/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace fciiml {

inline constexpr int kFeatureCount = 8;

/// Column order of the feature matrix.
enum class Feature : int {
    x_H2O_ch_an, ///< anode channel vapor mole fraction
    T_ch_ca,     ///< cathode channel temperature
    x_H2O_ch_ca,
    lambda_cl_an,
    c_H2O_cl_an,
    lambda_cl_ca,
    c_H2O_cl_ca,
    lambda_mb
};

const char* to_string(Feature f);

/// Row-major N x 8 matrix.
struct FeatureMatrix {
    int rows = 0;
    std::vector<double> values;

    double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * kFeatureCount + c]; }
    double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * kFeatureCount + c]; }
    const double* row(int r) const { return values.data() + static_cast<std::size_t>(r) * kFeatureCount; }
};

/// Throws NonFiniteResidual naming the column and node on a non-finite entry.
FeatureMatrix compute_features(const FuelCellModel& model, const CellState& state);

struct NormalizationBounds {
    std::array<double, kFeatureCount> lo{};
    std::array<double, kFeatureCount> hi{};
    bool operator==(const NormalizationBounds&) const = default;
};

inline constexpr double kBoundsMargin = 0.05;
inline constexpr double kScaledMin = -0.25;
inline constexpr double kScaledMax = 1.25;

/// Min/max over all rows widened by 5 % of the span per side; a constant
/// column is widened to +-0.5. `degenerate` receives such column indices.
NormalizationBounds fit_bounds(const std::vector<FeatureMatrix>& matrices,
                               std::vector<int>* degenerate = nullptr);

/// Affine map to [0, 1] over the bounds. Results are clamped to
/// [kScaledMin, kScaledMax]; `clamped` counts affected entries.
FeatureMatrix apply_bounds(const FeatureMatrix& m, const NormalizationBounds& b,
                           long long* clamped = nullptr);
FeatureMatrix invert_bounds(const FeatureMatrix& scaled, const NormalizationBounds& b);

} // namespace fciiml
