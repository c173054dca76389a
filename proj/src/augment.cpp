#include "fciiml/augment.hpp"

#include "fciiml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fciiml {

AugmentationField::AugmentationField(std::vector<double> values) : values_(std::move(values))
{
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]) || values_[i] < 0.0)
            throw DomainError("augmentation field entry " + std::to_string(i) +
                              " is negative or non-finite");
}

double compute_R_aug(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        throw DomainError("R_aug: field lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

void write_trace_csv(std::ostream& os, const FixedPointTrace& trace)
{
    os << "iteration,R_aug,newton_iterations\n";
    os.precision(12);
    for (std::size_t i = 0; i < trace.R_aug_history.size(); ++i)
        os << i + 1 << ',' << trace.R_aug_history[i] << ',' << trace.newton_per_solve[i] << '\n';
}

NotConverged::NotConverged(int case_id, FixedPointTrace trace)
    : std::runtime_error("augmented fixed-point iteration did not converge (case " +
                         std::to_string(case_id) + ", last R_aug=" +
                         std::to_string(trace.R_aug_history.empty() ? 0.0
                                                                     : trace.R_aug_history.back()) +
                         ")"),
      case_id_(case_id), trace_(std::move(trace))
{
}

SteadySolution solve_with_field(const ModelParameters& params, const OperatingConditions& oc,
                                const AugmentationField& delta, const SolverSettings& settings,
                                const CellState* warm)
{
    return solve_steady(params, oc, delta.values(), settings, warm);
}

AugmentedSolution fixed_point_solve(const ModelParameters& params, const OperatingConditions& oc,
                                    const AugmentationFunction& aug,
                                    const FixedPointSettings& fp, const SolverSettings& settings,
                                    const CellState* warm_state,
                                    const AugmentationField* warm_delta)
{
    if (!(fp.rho >= 0.0 && fp.rho < 1.0))
        throw DomainError("relaxation factor must lie in [0, 1)");
    const int N = params.geometry.N_y;
    std::vector<double> delta = warm_delta ? warm_delta->values() : std::vector<double>(N, 1.0);
    if (static_cast<int>(delta.size()) != N)
        throw DomainError("warm-start field has the wrong length");

    AugmentedSolution out;
    auto& tr = out.trace;
    CellState current;
    std::vector<double> solved_with;
    bool have_state = warm_state != nullptr;
    if (have_state)
        current = *warm_state;

    for (int it = 1; it <= fp.max_iter; ++it) {
        const FuelCellModel model(params, oc, delta);
        auto sol = solve_steady(model, settings, have_state ? &current : nullptr);
        if (!sol.report.converged)
            throw SolverDiverged(oc.case_id, sol.report.t, "steady state not reached by t_final");
        current = std::move(sol.state);
        have_state = true;
        out.kinetics_saturations += sol.kinetics_saturations;

        const std::vector<double> beta = aug(model, current);
        if (beta.size() != delta.size())
            throw DomainError("augmentation function returned the wrong length");
        std::vector<double> next(delta.size());
        for (std::size_t n = 0; n < next.size(); ++n)
            next[n] = fp.rho * delta[n] + (1.0 - fp.rho) * std::max(beta[n], 0.0);
        const double R = compute_R_aug(next, delta);
        tr.R_aug_history.push_back(R);
        tr.newton_per_solve.push_back(sol.report.newton_iterations);
        tr.wall_per_solve.push_back(sol.report.wall_seconds);
        tr.iterations = it;
        if (!std::isfinite(R))
            throw NotConverged(oc.case_id, tr);
        if (R < fp.tol) {
            tr.converged = true;
            out.state = std::move(current);
            out.delta = AugmentationField(std::move(delta));
            return out;
        }
        solved_with = std::move(delta);
        delta = std::move(next);
    }

    // bounded oscillation: no progress over the window but small residuals
    const auto& h = tr.R_aug_history;
    const int w = std::min<int>(fp.oscillation_window, static_cast<int>(h.size()) - 1);
    if (w > 0) {
        const double recent = *std::min_element(h.end() - w, h.end());
        const double before = *std::min_element(h.begin(), h.end() - w);
        tr.oscillation_detected = recent >= before;
    }
    if (h.back() < fp.oscillation_bound) {
        out.state = std::move(current);
        out.delta = AugmentationField(std::move(solved_with));
        return out;
    }
    throw NotConverged(oc.case_id, tr);
}

} // namespace fciiml
