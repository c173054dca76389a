#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fciiml {

/// Columns that can be perturbed together when building a finite-difference
/// Jacobian, and the rows each column can touch.
struct JacobianStructure {
    std::vector<std::vector<int>> column_groups;
    std::vector<std::vector<int>> rows_of_column; ///< sorted
};

/// Semi-explicit DAE  M du/dt = f(u)  with a 0/1 diagonal mass matrix.
/// Differential rows return time derivatives; algebraic rows return
/// residuals already normalized to O(1).
class DaeSystem {
public:
    virtual ~DaeSystem() = default;
    virtual std::size_t size() const = 0;
    virtual bool is_differential(std::size_t i) const = 0;
    /// Typical magnitude of each unknown.
    virtual std::span<const double> scales() const = 0;
    virtual void rhs(std::span<const double> u, std::span<double> f) const = 0;
    virtual const JacobianStructure& structure() const = 0;
    /// Clamp u into its admissible box; returns the number of entries moved.
    virtual int project(std::span<double>) const { return 0; }
    virtual std::vector<std::string> block_names() const { return {"all"}; }
    virtual int block_of(std::size_t) const { return 0; }
    virtual std::string describe(std::size_t i) const { return "u[" + std::to_string(i) + "]"; }
};

/// Dense structure: every column its own group, touching every row.
JacobianStructure dense_structure(std::size_t n);

struct SolverSettings {
    double dt_initial = 1.0e-2;
    double dt_max = 10.0;
    double dt_min = 1.0e-9;
    double t_final = 1000.0;
    double growth = 1.5;
    int growth_newton_limit = 5;  ///< grow dt only if Newton took <= this many iterations
    int max_newton = 20;
    double newton_tol = 1.0e-8;   ///< max-norm of the scaled residual
    double steady_tol = 1.0e-8;   ///< max-norm of scaled du/dt
    int max_halvings = 10;        ///< consecutive halvings before giving up
    int max_steps = 100000;
    bool record_history = true;
};

struct ResidualSample {
    double t = 0.0;
    double dt = 0.0;
    std::vector<double> block_norms; ///< max |du/dt| / scale per block
};

struct SolveReport {
    bool converged = false;        ///< reached the steady tolerance
    double t = 0.0;
    double final_rate_norm = 0.0;
    int steps = 0;
    int rejected_steps = 0;
    long long newton_iterations = 0;
    long long jacobian_evaluations = 0;
    long long rhs_evaluations = 0;
    long long clamp_events = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> block_names;
    std::vector<ResidualSample> history;
};

void write_residual_history_csv(std::ostream& os, const SolveReport& report);

/// Scaled max-norm of f over the differential rows (du/dt / scale).
double steady_rate_norm(const DaeSystem& sys, std::span<const double> u);

/// Implicit-Euler integrator with damped Newton and adaptive steps.
class DaeSolver {
public:
    DaeSolver(const DaeSystem& sys, SolverSettings settings);

    struct StepResult {
        bool ok = false;
        int iterations = 0;
        std::string why;
    };

    /// One implicit Euler step from u_old; on success u holds the new state.
    StepResult step(std::span<const double> u_old, double dt, std::span<double> u);

    /// March to steady state or t_final. Throws SolverDiverged after
    /// `max_halvings` consecutive failed steps.
    SolveReport integrate(std::vector<double>& u, int case_id = -1);

    /// Finite-difference Jacobian of f (not of the step residual), dense
    /// row-major, step 1e-6 (1 + |u|); used by tests and diagnostics.
    std::vector<double> fd_jacobian(std::span<const double> u);

    /// Jacobian of f from the grouped perturbations the Newton solver uses,
    /// dense row-major.
    std::vector<double> colored_jacobian(std::span<const double> u);

    const SolveReport& counters() const { return report_; }

private:
    void residual(std::span<const double> u, std::span<const double> u_old, double dt,
                  std::span<double> r);
    void build_pattern();
    bool factorize(std::span<const double> u, std::span<const double> u_old, double dt,
                   std::span<const double> r0);

    const DaeSystem& sys_;
    SolverSettings settings_;
    std::vector<double> scale_;
    std::vector<char> diff_;
    SolveReport report_;
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

} // namespace fciiml
