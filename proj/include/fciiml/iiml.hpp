#pragma once

#include "fciiml/augment.hpp"
#include "fciiml/data.hpp"
#include "fciiml/keyvalue.hpp"
#include "fciiml/mlp.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fciiml {

struct IimlConfig {
    double fd_step = 1.0e-4;
    double step_scale = 0.05;       ///< max |delta change| per inversion update
    int max_outer = 30;
    int ml_epochs = 500;
    double learning_rate = 1.0e-3;
    double reject_factor = 1.2;     ///< reject when J > factor * best J
    double objective_tol = 1.0e-10; ///< stop once J falls to this value
    std::uint64_t seed = 42;
    int workers = 1;
    FixedPointSettings fixed_point;
    SolverSettings solver;

    void validate() const;
    /// Unknown keys raise ConfigError.
    static IimlConfig from_keyvalue(const KeyValueFile& kv);
    KeyValueFile to_keyvalue() const;
};

struct TrainingCase {
    CaseRecord record;
    double weight = 1.0;
    AugmentationField delta;
    CellState state;       ///< steady state solved with `delta`
    double cost = 0.0;
    bool consistent = false; ///< (state, delta) came from a converged solve
};

using FieldCost = std::function<double(const std::vector<double>& delta)>;

struct GradientResult {
    std::vector<double> g;
    std::vector<int> zeroed; ///< nodes whose perturbed solves failed twice
    long long evaluations = 0;
};

/// Forward differences of `cost` around `delta` with step h; a failed
/// evaluation is retried with h/10, then the entry is set to 0.
GradientResult fd_gradient(const FieldCost& cost, const std::vector<double>& delta,
                           double base_cost, double h, int workers = 1);

/// Gradient of the case's data mismatch with respect to its field; every
/// perturbed solve warm-starts from the case's state.
GradientResult fd_gradient(const ModelParameters& params, const TrainingCase& tc,
                           const IimlConfig& cfg);

/// delta <- max(0, delta - alpha g), alpha = step_scale / |g|_inf. A zero
/// gradient leaves delta unchanged and sets `stationary`.
std::vector<double> field_inversion_update(const std::vector<double>& delta,
                                           const std::vector<double>& g, double step_scale,
                                           bool* stationary = nullptr);

/// Collates (features, target) rows from all cases, refits the bounds and
/// continues training from the current weights. Returns the final loss.
double ml_sync(const std::vector<TrainingCase>& cases,
               const std::vector<std::vector<double>>& targets, MlpModel& model,
               const IimlConfig& cfg, const ModelParameters& params);

/// Fixed-point solve of each case with the network; updates state, delta
/// and cost. Throws on the first (lowest index) failure.
std::vector<FixedPointTrace> field_correction(const ModelParameters& params,
                                              std::vector<TrainingCase>& cases,
                                              const MlpModel& model, const IimlConfig& cfg);

struct IterationRecord {
    int iteration = 0;
    bool accepted = false;
    std::string note;
    double step_scale = 0.0;
    double J = 0.0;
    std::vector<double> costs;
    std::vector<double> grad_inf;
    double ml_loss = 0.0;
    long long fd_solves = 0;
    long long fixed_point_solves = 0;
    std::vector<int> fixed_point_iterations;
};

struct IimlHistory {
    double J_baseline = 0.0;
    std::vector<double> baseline_costs;
    double J_best = 0.0;
    int best_iteration = 0; ///< 0 = baseline
    std::vector<IterationRecord> iterations;
};

struct IimlResult {
    MlpModel model;          ///< best accepted model
    IimlHistory history;
    std::vector<TrainingCase> cases; ///< cases at the best accepted iterate
};

using AcceptCallback = std::function<void(const IterationRecord&, const MlpModel&)>;

/// Weakly-coupled loop: inversion step, network sync, field correction.
/// `on_accept` runs after every accepted iteration (checkpointing).
IimlResult run_wciiml(const ModelParameters& params, const std::vector<CaseRecord>& training,
                      const IimlConfig& cfg, const AcceptCallback& on_accept = {});

void write_history_csv(std::ostream& os, const IimlHistory& h);

} // namespace fciiml
