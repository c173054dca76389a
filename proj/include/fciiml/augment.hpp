#pragma once

#include "fciiml/cell_solver.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace fciiml {

/// Per-node multiplicative correction of the equilibrium water content.
class AugmentationField {
public:
    AugmentationField() = default;
    /// Throws DomainError on negative or non-finite entries.
    explicit AugmentationField(std::vector<double> values);
    static AugmentationField neutral(int N) { return AugmentationField(std::vector<double>(N, 1.0)); }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    bool operator==(const AugmentationField&) const = default;

private:
    std::vector<double> values_;
};

/// Maps a converged state to a per-node augmentation value.
using AugmentationFunction =
    std::function<std::vector<double>(const FuelCellModel& model, const CellState& state)>;

/// Euclidean distance between successive fields; throws DomainError on a
/// length mismatch.
double compute_R_aug(const std::vector<double>& delta_i, const std::vector<double>& delta_prev);

struct FixedPointSettings {
    double rho = 0.5;
    double tol = 1.0e-3;
    int max_iter = 50;
    int oscillation_window = 10;
    double oscillation_bound = 1.0e-1;
};

struct FixedPointTrace {
    std::vector<double> R_aug_history;
    std::vector<long long> newton_per_solve; ///< Newton iterations of each inner solve
    std::vector<double> wall_per_solve;
    int iterations = 0;
    bool converged = false;
    bool oscillation_detected = false;
};

void write_trace_csv(std::ostream& os, const FixedPointTrace& trace);

/// The fixed-point loop gave up; carries the trace.
class NotConverged : public std::runtime_error {
public:
    NotConverged(int case_id, FixedPointTrace trace);
    const FixedPointTrace& trace() const { return trace_; }
    int case_id() const { return case_id_; }

private:
    int case_id_;
    FixedPointTrace trace_;
};

struct AugmentedSolution {
    CellState state;          ///< steady state solved with `delta`
    AugmentationField delta;
    FixedPointTrace trace;
    long long kinetics_saturations = 0;
};

/// Steady solve with a frozen field.
SteadySolution solve_with_field(const ModelParameters& params, const OperatingConditions& oc,
                                const AugmentationField& delta, const SolverSettings& settings,
                                const CellState* warm = nullptr);

/// Relaxed iteration delta_i = rho delta_{i-1} + (1 - rho) aug(u_i), where
/// u_i is the steady state for delta_{i-1}. Starts from delta = 1 unless a
/// warm pair is given. On return state and delta are mutually consistent.
AugmentedSolution fixed_point_solve(const ModelParameters& params, const OperatingConditions& oc,
                                    const AugmentationFunction& aug,
                                    const FixedPointSettings& fp, const SolverSettings& settings,
                                    const CellState* warm_state = nullptr,
                                    const AugmentationField* warm_delta = nullptr);

} // namespace fciiml
