#pragma once

#include "fciiml/features.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fciiml {

/// 8 -> 7 -> 7 -> 1 network: sigmoid, sigmoid, rectified linear output.
/// Parameters are stored flat, layer by layer: W (out x in, row-major), b.
class MlpModel {
public:
    static constexpr std::array<int, 4> kSizes{kFeatureCount, 7, 7, 1};
    static constexpr int kLayers = 3;

    MlpModel();

    /// Uniform(-r, r), r = sqrt(6 / (fan_in + fan_out)); output bias 1.
    static MlpModel initialize(std::uint64_t seed);

    static std::size_t parameter_count();
    static std::size_t weight_offset(int layer);
    static std::size_t bias_offset(int layer);

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    /// Output for one scaled feature row (length 8).
    double forward(const double* x) const;
    double forward(const std::vector<double>& x) const;

    /// Scales raw features with the attached bounds, then evaluates each row.
    std::vector<double> predict(const FeatureMatrix& raw, long long* clamped = nullptr) const;

    NormalizationBounds bounds;
    std::uint64_t seed = 0;

    bool operator==(const MlpModel&) const = default;

private:
    std::vector<double> params_;
};

struct LossAndGrad {
    double mse = 0.0;
    std::vector<double> grad;
};

/// Mean squared error over rows of `x` (already scaled) against `y`, with
/// reverse-mode gradients; the rectifier's subgradient at 0 is 0.
LossAndGrad loss_and_grad(const MlpModel& model, const FeatureMatrix& x, const std::vector<double>& y);

struct AdamState {
    double lr = 1.0e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1.0e-8;
    long long step = 0;
    std::vector<double> m, v;

    explicit AdamState(double learning_rate = 1.0e-3) : lr(learning_rate) {}
};

/// One bias-corrected Adam update of `params`.
void adam_step(std::vector<double>& params, AdamState& state, const std::vector<double>& grad);
inline void adam_step(MlpModel& model, AdamState& state, const std::vector<double>& grad)
{
    adam_step(model.parameters(), state, grad);
}

/// Full-batch Adam for `epochs` epochs; returns the loss before each update.
/// Throws NonFiniteResidual on a non-finite loss.
std::vector<double> train(MlpModel& model, const FeatureMatrix& x, const std::vector<double>& y,
                          int epochs, double lr = 1.0e-3);

} // namespace fciiml
