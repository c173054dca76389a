#include "fciiml/iiml.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/eval.hpp"
#include "fciiml/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace fciiml {

void IimlConfig::validate() const
{
    if (!(fd_step > 0.0 && step_scale > 0.0 && max_outer >= 1 && ml_epochs >= 0 &&
          learning_rate > 0.0 && reject_factor >= 1.0 && objective_tol >= 0.0 && workers >= 0))
        throw ConfigError("training settings must be positive");
    if (!(fixed_point.rho >= 0.0 && fixed_point.rho < 1.0 && fixed_point.tol > 0.0 &&
          fixed_point.max_iter >= 1))
        throw ConfigError("fixed-point settings out of range");
    if (!(solver.dt_initial > 0.0 && solver.dt_initial <= solver.dt_max && solver.newton_tol > 0.0 &&
          solver.steady_tol > 0.0 && solver.t_final > 0.0 && solver.max_newton >= 1))
        throw ConfigError("solver settings out of range");
}

namespace {

template <class Fn>
void visit_config(IimlConfig& c, Fn&& fn)
{
    fn("fd_step", c.fd_step);
    fn("step_scale", c.step_scale);
    fn("learning_rate", c.learning_rate);
    fn("reject_factor", c.reject_factor);
    fn("objective_tol", c.objective_tol);
    fn("fp_rho", c.fixed_point.rho);
    fn("fp_tol", c.fixed_point.tol);
    fn("fp_oscillation_bound", c.fixed_point.oscillation_bound);
    fn("dt_initial", c.solver.dt_initial);
    fn("dt_max", c.solver.dt_max);
    fn("t_final", c.solver.t_final);
    fn("newton_tol", c.solver.newton_tol);
    fn("steady_tol", c.solver.steady_tol);
}

template <class Fn>
void visit_config_int(IimlConfig& c, Fn&& fn)
{
    fn("max_outer", c.max_outer);
    fn("ml_epochs", c.ml_epochs);
    fn("workers", c.workers);
    fn("fp_max_iter", c.fixed_point.max_iter);
    fn("fp_oscillation_window", c.fixed_point.oscillation_window);
    fn("newton_max_iter", c.solver.max_newton);
    fn("max_halvings", c.solver.max_halvings);
}

} // namespace

IimlConfig IimlConfig::from_keyvalue(const KeyValueFile& kv)
{
    IimlConfig c;
    std::set<std::string> known{"seed"};
    visit_config(c, [&](const char* k, double& v) {
        known.insert(k);
        v = kv.get_double_or(k, v);
    });
    visit_config_int(c, [&](const char* k, int& v) {
        known.insert(k);
        v = static_cast<int>(kv.get_int_or(k, v));
    });
    c.seed = static_cast<std::uint64_t>(kv.get_int_or("seed", static_cast<long long>(c.seed)));
    for (const auto& k : kv.keys())
        if (!known.count(k))
            throw ConfigError(kv.origin() + ": unknown key '" + k + "'");
    c.validate();
    return c;
}

KeyValueFile IimlConfig::to_keyvalue() const
{
    KeyValueFile kv;
    IimlConfig c = *this;
    kv.set("seed", static_cast<long long>(seed));
    visit_config(c, [&](const char* k, double& v) { kv.set(k, v); });
    visit_config_int(c, [&](const char* k, int& v) { kv.set(k, v); });
    return kv;
}

GradientResult fd_gradient(const FieldCost& cost, const std::vector<double>& delta,
                           double base_cost, double h, int workers)
{
    const std::size_t N = delta.size();
    GradientResult out;
    out.g.assign(N, 0.0);
    std::vector<int> evals(N, 0), failed(N, 0);
    parallel_for(N, workers, [&](std::size_t n) {
        for (double step : {h, 0.1 * h}) {
            std::vector<double> d = delta;
            d[n] += step;
            ++evals[n];
            try {
                const double c = cost(d);
                if (!std::isfinite(c))
                    continue;
                out.g[n] = (c - base_cost) / step;
                return;
            } catch (const std::exception&) {
            }
        }
        failed[n] = 1;
    });
    for (std::size_t n = 0; n < N; ++n) {
        out.evaluations += evals[n];
        if (failed[n])
            out.zeroed.push_back(static_cast<int>(n));
    }
    return out;
}

GradientResult fd_gradient(const ModelParameters& params, const TrainingCase& tc,
                           const IimlConfig& cfg)
{
    if (!tc.consistent)
        throw DomainError("case " + std::to_string(tc.record.id()) +
                          ": gradient requested at a field without a converged state");
    const FieldCost c = [&](const std::vector<double>& d) {
        const FuelCellModel model(params, tc.record.oc, d);
        const auto sol = solve_steady(model, cfg.solver, &tc.state);
        if (!sol.report.converged)
            throw SolverDiverged(tc.record.id(), sol.report.t, "not steady by t_final");
        return cost(sol.state.lambda_mb(), tc.record.lambda_data);
    };
    return fd_gradient(c, tc.delta.values(), tc.cost, cfg.fd_step, cfg.workers);
}

std::vector<double> field_inversion_update(const std::vector<double>& delta,
                                           const std::vector<double>& g, double step_scale,
                                           bool* stationary)
{
    if (g.size() != delta.size())
        throw DomainError("gradient and field lengths differ");
    double gmax = 0.0;
    for (double x : g) {
        if (!std::isfinite(x))
            throw DomainError("non-finite gradient");
        gmax = std::max(gmax, std::abs(x));
    }
    if (stationary)
        *stationary = gmax == 0.0;
    if (gmax == 0.0)
        return delta;
    const double alpha = step_scale / gmax;
    std::vector<double> out(delta.size());
    for (std::size_t n = 0; n < delta.size(); ++n)
        out[n] = std::max(0.0, delta[n] - alpha * g[n]);
    return out;
}

double ml_sync(const std::vector<TrainingCase>& cases,
               const std::vector<std::vector<double>>& targets, MlpModel& model,
               const IimlConfig& cfg, const ModelParameters& params)
{
    std::vector<FeatureMatrix> feats;
    std::vector<double> y;
    for (std::size_t j = 0; j < cases.size(); ++j) {
        const FuelCellModel fm(params, cases[j].record.oc, cases[j].delta.values());
        feats.push_back(compute_features(fm, cases[j].state));
        y.insert(y.end(), targets[j].begin(), targets[j].end());
    }
    model.bounds = fit_bounds(feats);
    FeatureMatrix X;
    for (const auto& f : feats) {
        const auto s = apply_bounds(f, model.bounds);
        X.values.insert(X.values.end(), s.values.begin(), s.values.end());
        X.rows += s.rows;
    }
    train(model, X, y, cfg.ml_epochs, cfg.learning_rate);
    return loss_and_grad(model, X, y).mse;
}

std::vector<FixedPointTrace> field_correction(const ModelParameters& params,
                                              std::vector<TrainingCase>& cases,
                                              const MlpModel& model, const IimlConfig& cfg)
{
    const AugmentationFunction aug = network_augmentation(model);
    std::vector<AugmentedSolution> sols(cases.size());
    parallel_for(cases.size(), cfg.workers, [&](std::size_t j) {
        sols[j] = fixed_point_solve(params, cases[j].record.oc, aug, cfg.fixed_point, cfg.solver,
                                    &cases[j].state, &cases[j].delta);
    });
    std::vector<FixedPointTrace> traces;
    for (std::size_t j = 0; j < cases.size(); ++j) {
        cases[j].state = std::move(sols[j].state);
        cases[j].delta = std::move(sols[j].delta);
        cases[j].cost = cost(cases[j].state.lambda_mb(), cases[j].record.lambda_data);
        cases[j].consistent = true;
        traces.push_back(std::move(sols[j].trace));
    }
    return traces;
}

namespace {

double objective(const std::vector<TrainingCase>& cases, std::vector<double>* costs)
{
    std::vector<double> c, w;
    for (const auto& tc : cases) {
        c.push_back(tc.cost);
        w.push_back(tc.weight);
    }
    if (costs)
        *costs = c;
    return combined_objective(c, w);
}

} // namespace

IimlResult run_wciiml(const ModelParameters& params, const std::vector<CaseRecord>& training,
                      const IimlConfig& cfg, const AcceptCallback& on_accept)
{
    cfg.validate();
    if (training.empty())
        throw DomainError("training needs at least one case");
    const int N = params.geometry.N_y;
    std::vector<TrainingCase> cases(training.size());
    std::vector<SteadySolution> base(training.size());
    parallel_for(training.size(), cfg.workers, [&](std::size_t j) {
        base[j] = solve_steady(params, training[j].oc, {}, cfg.solver);
        if (!base[j].report.converged)
            throw SolverDiverged(training[j].id(), base[j].report.t, "baseline not steady by t_final");
    });
    for (std::size_t j = 0; j < training.size(); ++j) {
        if (static_cast<int>(training[j].lambda_data.size()) != N)
            throw DataError("case " + std::to_string(training[j].id()) + ": profile length mismatch");
        auto& tc = cases[j];
        tc.record = training[j];
        tc.delta = AugmentationField::neutral(N);
        tc.state = std::move(base[j].state);
        tc.cost = cost(tc.state.lambda_mb(), tc.record.lambda_data);
        tc.consistent = true;
    }

    IimlResult res;
    auto& hist = res.history;
    hist.J_baseline = objective(cases, &hist.baseline_costs);
    hist.J_best = hist.J_baseline;
    MlpModel model = MlpModel::initialize(cfg.seed);
    MlpModel best_model = model;
    std::vector<TrainingCase> best_cases = cases;
    // last accepted snapshot, which rejections revert to
    MlpModel acc_model = model;
    std::vector<TrainingCase> acc_cases = cases;
    double step_scale = cfg.step_scale;
    bool last_rejected = false;

    if (hist.J_baseline <= cfg.objective_tol) {
        // nothing to infer: a unit network keeps every case at its baseline
        for (int k = 0; k < MlpModel::kSizes[MlpModel::kLayers - 1]; ++k)
            model.parameters()[MlpModel::weight_offset(MlpModel::kLayers - 1) + k] = 0.0;
        model.parameters()[MlpModel::bias_offset(MlpModel::kLayers - 1)] = 1.0;
        std::vector<FeatureMatrix> feats;
        for (const auto& tc : cases)
            feats.push_back(compute_features(FuelCellModel(params, tc.record.oc, tc.delta.values()), tc.state));
        model.bounds = fit_bounds(feats);
        IterationRecord rec;
        rec.iteration = 1;
        rec.accepted = true;
        rec.step_scale = step_scale;
        rec.J = hist.J_baseline;
        rec.costs = hist.baseline_costs;
        rec.grad_inf.assign(cases.size(), 0.0);
        rec.note = "baseline within objective tolerance";
        hist.iterations.push_back(rec);
        hist.best_iteration = 1;
        if (on_accept)
            on_accept(rec, model);
        res.model = std::move(model);
        res.cases = std::move(cases);
        return res;
    }

    for (int it = 1; it <= cfg.max_outer; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        rec.step_scale = step_scale;
        // 1. field inversion step per case
        std::vector<std::vector<double>> targets(cases.size());
        for (std::size_t j = 0; j < cases.size(); ++j) {
            const auto gr = fd_gradient(params, cases[j], cfg);
            rec.fd_solves += gr.evaluations;
            double gmax = 0.0;
            for (double x : gr.g)
                gmax = std::max(gmax, std::abs(x));
            rec.grad_inf.push_back(gmax);
            targets[j] = field_inversion_update(cases[j].delta.values(), gr.g, step_scale);
        }

        // 2. synchronize the network on the updated fields
        rec.ml_loss = ml_sync(cases, targets, model, cfg, params);

        // 3. field correction with the new network
        bool ok = true;
        try {
            const auto traces = field_correction(params, cases, model, cfg);
            for (const auto& t : traces) {
                rec.fixed_point_solves += t.iterations;
                rec.fixed_point_iterations.push_back(t.iterations);
            }
        } catch (const std::exception& e) {
            ok = false;
            rec.note = std::string("field correction failed: ") + e.what();
        }
        if (ok) {
            rec.J = objective(cases, &rec.costs);
            if (!(rec.J <= cfg.reject_factor * hist.J_best)) {
                ok = false;
                rec.note = "objective above acceptance threshold";
            }
        }
        rec.accepted = ok;
        hist.iterations.push_back(rec);

        if (!ok) {
            model = acc_model;
            cases = acc_cases;
            if (last_rejected)
                break;
            last_rejected = true;
            step_scale *= 0.5;
            continue;
        }
        last_rejected = false;
        if (on_accept)
            on_accept(rec, model);
        acc_model = model;
        acc_cases = cases;
        if (rec.J < hist.J_best) {
            hist.J_best = rec.J;
            hist.best_iteration = it;
            best_model = model;
            best_cases = cases;
        }
        if (rec.J <= cfg.objective_tol)
            break;
    }
    res.model = std::move(best_model);
    res.cases = std::move(best_cases);
    return res;
}

void write_history_csv(std::ostream& os, const IimlHistory& h)
{
    os << "iteration,accepted,J,step_scale,ml_loss,max_grad_inf,fd_solves,fixed_point_solves,note\n";
    os << "0,1," << format_double(h.J_baseline) << ",,,,0,0,baseline\n";
    for (const auto& r : h.iterations) {
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        double g = 0.0;
        for (double x : r.grad_inf)
            g = std::max(g, x);
        os << r.iteration << ',' << (r.accepted ? 1 : 0) << ','
           << (r.accepted ? format_double(r.J) : std::string()) << ',' << format_double(r.step_scale)
           << ',' << format_double(r.ml_loss) << ',' << format_double(g) << ',' << r.fd_solves << ','
           << r.fixed_point_solves << ',' << note << '\n';
    }
}

} // namespace fciiml
