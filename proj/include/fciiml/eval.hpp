#pragma once

#include "fciiml/augment.hpp"
#include "fciiml/mlp.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace fciiml {

struct CaseRecord;

/// Squared Euclidean distance; throws DomainError on a length mismatch.
double cost(const std::vector<double>& pred, const std::vector<double>& data);

/// Weighted sum of per-case costs; empty weights mean all ones.
double combined_objective(const std::vector<double>& costs, const std::vector<double>& weights = {});

struct MetricValue {
    double value = 0.0;
    bool degenerate = false; ///< both error norms vanish
};

/// 2|b - d| / (|a - d| + |b - d|) - 1.
MetricValue metric_P1(const std::vector<double>& q_baseline, const std::vector<double>& q_augmented,
                      const std::vector<double>& q_data);
/// P1 |a - b| / (|a - d| + |b - d|).
MetricValue metric_P2(const std::vector<double>& q_baseline, const std::vector<double>& q_augmented,
                      const std::vector<double>& q_data);

struct MetricsRecord {
    int case_id = 0;
    bool ok = false;          ///< both solves succeeded
    std::string error;        ///< failure message when !ok
    double P1_lambda = 0.0, P2_lambda = 0.0;
    bool has_j = false;
    double P1_j = 0.0, P2_j = 0.0;
    double err_baseline = 0.0, err_augmented = 0.0; ///< L2 errors of lambda_mb
    bool training = false;
    bool oscillation = false;
    bool degenerate = false;
    long long extrapolated = 0; ///< clamped scaled feature entries
    int fixed_point_iterations = 0;
};

struct SuiteSummary {
    int cases = 0;
    int evaluated = 0;
    int failed = 0;
    int positive_P1 = 0;
    double positive_fraction = 0.0;      ///< over evaluated cases
    int test_evaluated = 0;
    int test_positive_P1 = 0;
    double test_positive_fraction = 0.0; ///< over evaluated non-training cases
    double mean_P1 = 0.0;
};

struct EvaluationSettings {
    SolverSettings solver;
    FixedPointSettings fixed_point;
    int workers = 1;
};

/// Augmentation function that evaluates a trained network on the state's
/// features.
AugmentationFunction network_augmentation(const MlpModel& model);

/// Baseline and fixed-point augmented solves for every case, then P1/P2.
std::vector<MetricsRecord> evaluate_suite(const ModelParameters& params,
                                          const std::vector<CaseRecord>& cases,
                                          const MlpModel& model, const std::set<int>& training_ids,
                                          const EvaluationSettings& settings);

SuiteSummary summarize(const std::vector<MetricsRecord>& records);

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records);
void write_summary(std::ostream& os, const SuiteSummary& s);

} // namespace fciiml
