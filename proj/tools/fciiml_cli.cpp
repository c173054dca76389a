#include "fciiml/data.hpp"
#include "fciiml/errors.hpp"
#include "fciiml/eval.hpp"
#include "fciiml/iiml.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace fciiml;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kDiverged = 3, kData = 4 };

struct Options {
    std::string constants;
    std::string config;
    std::vector<std::string> overrides;
    int workers = 0;
    long long seed = -1;

    std::string spec;
    std::string out;
    int count = -1;

    std::string cases;
    std::string weights;
    std::string train_ids;
    int case_id = -1;
    std::string sealed;
};

void print_error(int code, const std::string& kind, const std::string& message, int case_id = -1)
{
    std::cerr << "error:\n"
              << "  code = " << code << '\n'
              << "  kind = " << kind << '\n'
              << "  message = " << message << '\n';
    if (case_id >= 0)
        std::cerr << "  case_id = " << case_id << '\n';
}

ModelParameters load_params(const Options& o)
{
    return o.constants.empty() ? ModelParameters::defaults() : ModelParameters::load(o.constants);
}

IimlConfig load_config(const Options& o)
{
    KeyValueFile kv = o.config.empty() ? KeyValueFile{} : KeyValueFile::load(o.config);
    for (const auto& s : o.overrides) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override '" + s + "' is not key=value");
        kv.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.seed >= 0)
        kv.set("seed", o.seed);
    if (o.workers > 0)
        kv.set("workers", o.workers);
    return IimlConfig::from_keyvalue(kv);
}

std::vector<int> parse_ids(const std::string& text)
{
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            continue;
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw ConfigError("bad case id '" + tok + "'");
        ids.push_back(v);
    }
    return ids;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    if (!os)
        throw DataError("cannot write " + p.string());
    os << text;
}

std::string manifest(const std::string& command, const ModelParameters& params, const IimlConfig& cfg,
                     const std::vector<int>& case_ids, const std::string& extra = "")
{
    std::ostringstream os;
    os << "# run manifest\nformat_version = " << kFormatVersion << "\ncommand = " << command << '\n';
    os << "case_ids =";
    for (int id : case_ids)
        os << ' ' << id;
    os << "\n\n[config]\n" << cfg.to_keyvalue().to_string() << "\n[constants]\n"
       << params.to_keyvalue().to_string();
    if (!extra.empty())
        os << '\n' << extra;
    return os.str();
}

int cmd_gen_truth(const Options& o)
{
    const ModelParameters params = load_params(o);
    const IimlConfig cfg = load_config(o);
    TruthGeneratorSpec spec = o.spec.empty() ? TruthGeneratorSpec{}
                                             : TruthGeneratorSpec::from_keyvalue(KeyValueFile::load(o.spec));
    if (o.count > 0)
        spec.case_count = o.count;
    if (o.seed >= 0)
        spec.seed = static_cast<std::uint64_t>(o.seed);
    const auto res = generate_truth(spec, params, cfg.solver, cfg.fixed_point, cfg.workers);
    for (const auto& w : res.warnings)
        std::cerr << "warning: " << w << '\n';
    if (res.cases.empty())
        throw SolverDiverged(-1, 0.0, "no truth case converged");
    save_cases(o.out, res.cases);
    write_truth_sidecar((fs::path(o.out) / "truth.sealed").string(), spec);
    std::vector<int> ids;
    for (const auto& c : res.cases)
        ids.push_back(c.id());
    write_text(fs::path(o.out) / "manifest.txt",
               manifest("gen-truth", params, cfg, ids,
                        "dropped = " + std::to_string(res.dropped) + "\n"));
    std::cout << "generated " << res.cases.size() << " cases (" << res.dropped << " dropped) in "
              << o.out << '\n';
    return kOk;
}

const CaseRecord& find_case(const std::vector<CaseRecord>& cases, int id)
{
    for (const auto& c : cases)
        if (c.id() == id)
            return c;
    throw DataError("unknown case id " + std::to_string(id));
}

int cmd_simulate(const Options& o)
{
    const ModelParameters params = load_params(o);
    const IimlConfig cfg = load_config(o);
    const auto cases = load_cases(o.cases, params.geometry.N_y);
    const CaseRecord& c = find_case(cases, o.case_id);
    fs::create_directories(o.out);

    const auto base = solve_steady(params, c.oc, {}, cfg.solver);
    if (!base.report.converged)
        throw SolverDiverged(c.id(), base.report.t, "baseline not steady by t_final");
    {
        std::ofstream os(fs::path(o.out) / "residual_history.csv");
        write_residual_history_csv(os, base.report);
    }
    std::optional<AugmentedSolution> aug;
    std::optional<MlpModel> model;
    if (!o.weights.empty()) {
        model = load_weights(o.weights);
        aug = fixed_point_solve(params, c.oc, network_augmentation(*model), cfg.fixed_point,
                                cfg.solver, &base.state);
        std::ofstream os(fs::path(o.out) / "fixed_point_trace.csv");
        write_trace_csv(os, aug->trace);
    }
    const auto y = uniform_grid(params.geometry.N_y);
    std::ostringstream os;
    os << "y,lambda_baseline,i_baseline,lambda_data";
    if (aug)
        os << ",lambda_augmented,i_augmented,delta";
    os << '\n';
    for (int n = 0; n < params.geometry.N_y; ++n) {
        os << format_double(y[n]) << ',' << format_double(base.state.lambda_mb(n)) << ','
           << format_double(base.state(n, Var::i_loc)) << ',' << format_double(c.lambda_data[n]);
        if (aug)
            os << ',' << format_double(aug->state.lambda_mb(n)) << ','
               << format_double(aug->state(n, Var::i_loc)) << ',' << format_double(aug->delta[n]);
        os << '\n';
    }
    write_text(fs::path(o.out) / ("profile_case_" + std::to_string(c.id()) + ".csv"), os.str());
    std::cout << "case " << c.id() << ": V_cell baseline = " << format_double(base.state.V_cell());
    if (aug)
        std::cout << ", augmented = " << format_double(aug->state.V_cell());
    std::cout << '\n';
    return kOk;
}

int cmd_train(const Options& o)
{
    const ModelParameters params = load_params(o);
    const IimlConfig cfg = load_config(o);
    const auto cases = load_cases(o.cases, params.geometry.N_y);
    const auto ids = parse_ids(o.train_ids);
    if (ids.empty())
        throw ConfigError("--train-ids must name at least one case");
    const auto split = select_training(cases, ids);
    const fs::path out(o.out);
    fs::create_directories(out / "checkpoints");

    const auto res = run_wciiml(params, split.training, cfg,
                                [&](const IterationRecord& r, const MlpModel& m) {
                                    save_weights((out / "checkpoints" /
                                                  ("weights_iter" + std::to_string(r.iteration) + ".txt"))
                                                     .string(),
                                                 m, "checkpoint iteration " + std::to_string(r.iteration));
                                });
    save_weights((out / "weights.txt").string(), res.model,
                 "best iteration " + std::to_string(res.history.best_iteration));
    {
        std::ofstream os(out / "j_history.csv");
        write_history_csv(os, res.history);
    }
    std::ostringstream hist;
    hist << "J_baseline = " << format_double(res.history.J_baseline) << '\n'
         << "J_best = " << format_double(res.history.J_best) << '\n'
         << "best_iteration = " << res.history.best_iteration << '\n';
    for (const auto& r : res.history.iterations)
        hist << "iteration_" << r.iteration << " = " << (r.accepted ? format_double(r.J) : "rejected")
             << '\n';
    write_text(out / "manifest.txt", manifest("train", params, cfg, ids, hist.str()));
    std::cout << "J baseline " << format_double(res.history.J_baseline) << ", best "
              << format_double(res.history.J_best) << " at iteration " << res.history.best_iteration
              << '\n';
    return kOk;
}

int cmd_evaluate(const Options& o)
{
    const ModelParameters params = load_params(o);
    const IimlConfig cfg = load_config(o);
    const auto cases = load_cases(o.cases, params.geometry.N_y);
    const MlpModel model = load_weights(o.weights);
    const auto ids = parse_ids(o.train_ids);
    std::set<int> train(ids.begin(), ids.end());
    EvaluationSettings es;
    es.solver = cfg.solver;
    es.fixed_point = cfg.fixed_point;
    es.workers = cfg.workers;
    const auto recs = evaluate_suite(params, cases, model, train, es);
    const auto summary = summarize(recs);
    fs::create_directories(o.out);
    {
        std::ofstream os(fs::path(o.out) / "metrics.csv");
        write_metrics_csv(os, recs);
    }
    {
        std::ofstream os(fs::path(o.out) / "summary.txt");
        write_summary(os, summary);
    }
    for (const auto& r : recs)
        if (!r.ok)
            std::cerr << "warning: case " << r.case_id << " failed: " << r.error << '\n';
    write_summary(std::cout, summary);
    return kOk;
}

int cmd_verify_truth(const Options& o)
{
    const ModelParameters params = load_params(o);
    const IimlConfig cfg = load_config(o);
    const auto cases = load_cases(o.cases, params.geometry.N_y);
    const std::string sealed = o.sealed.empty() ? (fs::path(o.cases) / "truth.sealed").string() : o.sealed;
    const TruthGeneratorSpec spec = read_truth_sidecar(sealed);
    const AugmentationFunction hidden = [&spec](const FuelCellModel&, const CellState& s) {
        std::vector<double> b(static_cast<std::size_t>(s.nodes()));
        for (int n = 0; n < s.nodes(); ++n)
            b[n] = spec.beta(s.lambda_mb(n));
        return b;
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto sol = fixed_point_solve(params, c.oc, hidden, cfg.fixed_point, cfg.solver);
        const auto lam = sol.state.lambda_mb();
        for (std::size_t n = 0; n < lam.size(); ++n)
            worst = std::max(worst, std::abs(lam[n] - c.lambda_data[n]));
    }
    std::cout << "cases = " << cases.size() << "\nmax_abs_lambda_difference = " << format_double(worst)
              << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reduced PEM fuel-cell simulator with weakly-coupled augmentation training"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--constants", o.constants, "Model constants file (key = value)")->check(CLI::ExistingFile);
    app.add_option("--config", o.config, "Training/solver config file (key = value)")->check(CLI::ExistingFile);
    app.add_option("--set", o.overrides, "Config override key=value (repeatable)");
    app.add_option("--workers", o.workers, "Parallel workers (0 = config value)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", o.seed, "Seed override (network init, truth sampling)");

    auto* gen = app.add_subcommand("gen-truth", "Generate a synthetic case set with a hidden augmentation");
    gen->add_option("--spec", o.spec, "Truth generator spec file")->check(CLI::ExistingFile);
    gen->add_option("--out", o.out, "Output directory")->required();
    gen->add_option("--count", o.count, "Number of cases");

    auto* sim = app.add_subcommand("simulate", "Solve one case (baseline, and augmented with weights)");
    sim->add_option("--cases", o.cases, "Case directory")->required();
    sim->add_option("--case-id", o.case_id, "Case id")->required();
    sim->add_option("--weights", o.weights, "Weights file")->check(CLI::ExistingFile);
    sim->add_option("--out", o.out, "Output directory")->required();

    auto* tr = app.add_subcommand("train", "Run weakly-coupled training");
    tr->add_option("--cases", o.cases, "Case directory")->required();
    tr->add_option("--train-ids", o.train_ids, "Comma-separated training case ids")->required();
    tr->add_option("--out", o.out, "Output directory")->required();

    auto* ev = app.add_subcommand("evaluate", "Evaluate a trained network on a case set");
    ev->add_option("--cases", o.cases, "Case directory")->required();
    ev->add_option("--weights", o.weights, "Weights file")->required()->check(CLI::ExistingFile);
    ev->add_option("--train-ids", o.train_ids, "Ids flagged as training cases in the metrics");
    ev->add_option("--out", o.out, "Output directory")->required();

    auto* vt = app.add_subcommand("verify-truth", "Re-solve a synthetic set with its sealed hidden augmentation");
    vt->add_option("--cases", o.cases, "Case directory")->required();
    vt->add_option("--sealed", o.sealed, "Sealed sidecar (default <cases>/truth.sealed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(kConfig, "UsageError", e.what());
        return kConfig;
    }

    try {
        if (*gen)
            return cmd_gen_truth(o);
        if (*sim)
            return cmd_simulate(o);
        if (*tr)
            return cmd_train(o);
        if (*ev)
            return cmd_evaluate(o);
        if (*vt)
            return cmd_verify_truth(o);
    } catch (const SolverDiverged& e) {
        print_error(kDiverged, "SolverDiverged", e.what(), e.case_id());
        return kDiverged;
    } catch (const NotConverged& e) {
        print_error(kDiverged, "NotConverged", e.what(), e.case_id());
        return kDiverged;
    } catch (const NonFiniteResidual& e) {
        print_error(kDiverged, "NonFiniteResidual", e.what());
        return kDiverged;
    } catch (const ConfigError& e) {
        print_error(kConfig, "ConfigError", e.what());
        return kConfig;
    } catch (const DomainError& e) {
        print_error(kConfig, "DomainError", e.what());
        return kConfig;
    } catch (const DataError& e) {
        print_error(kData, "DataError", e.what());
        return kData;
    } catch (const std::exception& e) {
        print_error(kData, "Error", e.what());
        return kData;
    }
    return kOk;
}
