#include "fciiml/eval.hpp"

#include "fciiml/data.hpp"
#include "fciiml/errors.hpp"
#include "fciiml/parallel.hpp"

#include <cmath>
#include <ostream>

namespace fciiml {

namespace {

double l2(const std::vector<double>& a, const std::vector<double>& b)
{
    return std::sqrt(cost(a, b));
}

} // namespace

double cost(const std::vector<double>& pred, const std::vector<double>& data)
{
    if (pred.size() != data.size())
        throw DomainError("cost: profile lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        s += (pred[i] - data[i]) * (pred[i] - data[i]);
    return s;
}

double combined_objective(const std::vector<double>& costs, const std::vector<double>& weights)
{
    if (!weights.empty() && weights.size() != costs.size())
        throw DomainError("combined_objective: one weight per case required");
    double J = 0.0;
    for (std::size_t j = 0; j < costs.size(); ++j) {
        if (!std::isfinite(costs[j]))
            throw DomainError("combined_objective: missing cost for case index " + std::to_string(j));
        J += (weights.empty() ? 1.0 : weights[j]) * costs[j];
    }
    return J;
}

MetricValue metric_P1(const std::vector<double>& qb, const std::vector<double>& qa,
                      const std::vector<double>& qd)
{
    const double eb = l2(qb, qd);
    const double ea = l2(qa, qd);
    if (ea + eb == 0.0)
        return {0.0, true};
    return {2.0 * eb / (ea + eb) - 1.0, false};
}

MetricValue metric_P2(const std::vector<double>& qb, const std::vector<double>& qa,
                      const std::vector<double>& qd)
{
    const double eb = l2(qb, qd);
    const double ea = l2(qa, qd);
    if (ea + eb == 0.0)
        return {0.0, true};
    const double P1 = 2.0 * eb / (ea + eb) - 1.0;
    return {P1 * l2(qa, qb) / (ea + eb), false};
}

AugmentationFunction network_augmentation(const MlpModel& model)
{
    return [&model](const FuelCellModel& fm, const CellState& s) {
        return model.predict(compute_features(fm, s));
    };
}

std::vector<MetricsRecord> evaluate_suite(const ModelParameters& params,
                                          const std::vector<CaseRecord>& cases,
                                          const MlpModel& model, const std::set<int>& training_ids,
                                          const EvaluationSettings& settings)
{
    std::vector<MetricsRecord> out(cases.size());
    parallel_for(cases.size(), settings.workers, [&](std::size_t k) {
        const CaseRecord& c = cases[k];
        MetricsRecord& r = out[k];
        r.case_id = c.id();
        r.training = training_ids.count(c.id()) > 0;
        try {
            const auto base = solve_steady(params, c.oc, {}, settings.solver);
            if (!base.report.converged)
                throw SolverDiverged(c.id(), base.report.t, "baseline not steady by t_final");
            long long clamped = 0;
            AugmentationFunction aug = [&](const FuelCellModel& fm, const CellState& s) {
                long long local = 0;
                auto beta = model.predict(compute_features(fm, s), &local);
                clamped = local;
                return beta;
            };
            const auto augd = fixed_point_solve(params, c.oc, aug, settings.fixed_point,
                                                settings.solver, &base.state);
            const auto lb = base.state.lambda_mb();
            const auto la = augd.state.lambda_mb();
            const auto p1 = metric_P1(lb, la, c.lambda_data);
            r.P1_lambda = p1.value;
            r.P2_lambda = metric_P2(lb, la, c.lambda_data).value;
            r.degenerate = p1.degenerate;
            r.err_baseline = l2(lb, c.lambda_data);
            r.err_augmented = l2(la, c.lambda_data);
            if (!c.j_data.empty()) {
                r.has_j = true;
                const auto jb = base.state.i_loc();
                const auto ja = augd.state.i_loc();
                r.P1_j = metric_P1(jb, ja, c.j_data).value;
                r.P2_j = metric_P2(jb, ja, c.j_data).value;
            }
            r.oscillation = augd.trace.oscillation_detected;
            r.extrapolated = clamped;
            r.fixed_point_iterations = augd.trace.iterations;
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    });
    return out;
}

SuiteSummary summarize(const std::vector<MetricsRecord>& records)
{
    SuiteSummary s;
    s.cases = static_cast<int>(records.size());
    double sum = 0.0;
    for (const auto& r : records) {
        if (!r.ok) {
            ++s.failed;
            continue;
        }
        ++s.evaluated;
        sum += r.P1_lambda;
        if (r.P1_lambda > 0.0)
            ++s.positive_P1;
        if (!r.training) {
            ++s.test_evaluated;
            if (r.P1_lambda > 0.0)
                ++s.test_positive_P1;
        }
    }
    if (s.evaluated > 0) {
        s.positive_fraction = static_cast<double>(s.positive_P1) / s.evaluated;
        s.mean_P1 = sum / s.evaluated;
    }
    if (s.test_evaluated > 0)
        s.test_positive_fraction = static_cast<double>(s.test_positive_P1) / s.test_evaluated;
    return s;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records)
{
    os << "case_id,P1_lambda,P2_lambda,P1_j,P2_j,err_baseline,err_augmented,flags\n";
    for (const auto& r : records) {
        std::string flags;
        auto add = [&](const char* f) {
            if (!flags.empty())
                flags += '|';
            flags += f;
        };
        if (r.training)
            add("train");
        if (!r.ok)
            add("failed");
        if (r.oscillation)
            add("oscillation");
        if (r.degenerate)
            add("degenerate");
        if (r.extrapolated > 0)
            flags += (flags.empty() ? "" : "|") + std::string("extrapolated=") + std::to_string(r.extrapolated);
        os << r.case_id << ',';
        if (r.ok) {
            os << format_double(r.P1_lambda) << ',' << format_double(r.P2_lambda) << ',';
            if (r.has_j)
                os << format_double(r.P1_j) << ',' << format_double(r.P2_j) << ',';
            else
                os << ",,";
            os << format_double(r.err_baseline) << ',' << format_double(r.err_augmented);
        } else {
            os << ",,,,,";
        }
        os << ',' << flags << '\n';
    }
}

void write_summary(std::ostream& os, const SuiteSummary& s)
{
    os << "cases = " << s.cases << '\n'
       << "evaluated = " << s.evaluated << '\n'
       << "failed = " << s.failed << '\n'
       << "P1_positive = " << s.positive_P1 << '\n'
       << "P1_positive_fraction = " << format_double(s.positive_fraction) << '\n'
       << "test_evaluated = " << s.test_evaluated << '\n'
       << "test_P1_positive = " << s.test_positive_P1 << '\n'
       << "test_P1_positive_fraction = " << format_double(s.test_positive_fraction) << '\n'
       << "mean_P1 = " << format_double(s.mean_P1) << '\n';
}

} // namespace fciiml
