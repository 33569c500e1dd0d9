#include "mixsel/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mixsel/harness.hpp"
#include "mixsel/init.hpp"

namespace mixsel {

namespace {

namespace fs = std::filesystem;

/// Write-then-rename so consumers never observe a partial file.
void write_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
    }
    fs::rename(tmp, path);
}

template <typename WriteFn>
void write_atomic_with(const fs::path& path, WriteFn&& fn) {
    std::ostringstream buf;
    fn(buf);
    write_atomic(path, buf.str());
}

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    double epsilon = 1e-6;
    double a = 3.7;
    double prune_threshold = 1e-4;
    int max_iter = 2000;
    double tol = 1e-8;

    EMConfig em() const {
        EMConfig config;
        config.max_iter = max_iter;
        config.rel_tol = tol;
        config.prune_threshold = prune_threshold;
        return config;
    }
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--seed", opts.seed, "root seed; all randomness derives from it");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--epsilon", opts.epsilon, "penalty epsilon")->check(CLI::PositiveNumber);
    cmd->add_option("--a", opts.a, "SCAD shape parameter")->check(CLI::Range(2.0, 1e6));
    cmd->add_option("--prune-threshold", opts.prune_threshold, "component deletion threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", opts.max_iter, "EM iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opts.tol, "relative convergence tolerance")
        ->check(CLI::PositiveNumber);
}

PenaltySpec make_spec(const std::string& penalty, double lambda, int dim,
                      const CommonOptions& opts) {
    PenaltySpec spec = penalty == "scad" ? PenaltySpec::scad_log(lambda, dim)
                                         : PenaltySpec::log_eps(lambda, dim);
    spec.epsilon = opts.epsilon;
    spec.a = opts.a;
    return spec;
}

DatasetSpec example_spec(int example, int n, std::uint64_t seed) {
    if (example == 1) return example1_spec(n > 0 ? n : 600, seed);
    return example2_spec(n > 0 ? n : 1000, seed);
}

int cmd_simulate(int example, int n, const CommonOptions& opts) {
    const DatasetSpec spec = example_spec(example, n, opts.seed);
    const Matrix data = generate(spec);
    fs::create_directories(opts.out_dir);
    write_atomic_with(fs::path(opts.out_dir) / "data.csv",
                      [&](std::ostream& out) { save_csv(data, out); });
    write_atomic(fs::path(opts.out_dir) / "truth_model.json", model_to_json(spec.truth) + "\n");
    std::cout << "wrote " << data.rows() << " rows to " << opts.out_dir << "/data.csv\n";
    return 0;
}

Matrix load_input(const std::string& csv, bool header, const std::vector<int>& columns) {
    return load_csv(csv, header, columns);
}

int cmd_fit(const std::string& csv, bool header, const std::vector<int>& columns,
            const std::string& penalty, double lambda, int m_init, const CommonOptions& opts) {
    const Matrix data = load_input(csv, header, columns);
    const PenaltySpec spec = make_spec(penalty, lambda, static_cast<int>(data.cols()), opts);
    const EMConfig config = opts.em();
    Rng rng(opts.seed);
    const MixtureModel init = init_from_kmeans(data, m_init, config.cov_floor, rng);
    const auto [model, trace] = fit_penalized(data, init, spec, config);

    fs::create_directories(opts.out_dir);
    write_atomic(fs::path(opts.out_dir) / "model.json", model_to_json(model) + "\n");
    write_atomic_with(fs::path(opts.out_dir) / "trace.csv",
                      [&](std::ostream& out) { write_trace_csv(trace, out); });
    std::cout << "fit: M_hat=" << model.order() << " iterations=" << trace.iterations()
              << (trace.converged() ? " (converged)" : " (max-iter)") << '\n';
    return 0;
}

int cmd_select(const std::string& csv, bool header, const std::vector<int>& columns,
               const std::string& penalty, int m_init, int grid_count,
               const CommonOptions& opts) {
    const Matrix data = load_input(csv, header, columns);
    const int dim = static_cast<int>(data.cols());
    const PenaltySpec tmpl = make_spec(penalty, 0.0, dim, opts);
    const EMConfig config = opts.em();
    const std::vector<double> grid =
        lambda_grid_for(tmpl, static_cast<int>(data.rows()), m_init, grid_count);
    Rng rng(opts.seed);
    const SelectionResult result = select_lambda(data, m_init, tmpl, grid, config, rng);

    fs::create_directories(opts.out_dir);
    write_atomic_with(fs::path(opts.out_dir) / "selection.csv",
                      [&](std::ostream& out) { write_selection_csv(result, out); });
    write_atomic(fs::path(opts.out_dir) / "model.json", model_to_json(result.best_model) + "\n");
    write_atomic_with(fs::path(opts.out_dir) / "trace.csv",
                      [&](std::ostream& out) { write_trace_csv(result.best_trace, out); });
    std::cout << "selected lambda=" << result.best_lambda
              << " M_hat=" << result.best_model.order() << '\n';
    return 0;
}

int cmd_bench(int example, int n, const std::string& method, int reps, int m_init,
              int grid_count, int threads, const CommonOptions& opts) {
    const DatasetSpec spec = example_spec(example, n, opts.seed);
    HarnessConfig config;
    config.m_init = m_init;
    config.grid_count = grid_count;
    config.em = opts.em();
    config.threads = threads;
    const ExperimentReport report =
        run_replications(spec, method_from_name(method), reps, config);

    fs::create_directories(opts.out_dir);
    write_atomic(fs::path(opts.out_dir) / "report.json", report_to_json(report) + "\n");
    write_atomic_with(fs::path(opts.out_dir) / "histogram.csv",
                      [&](std::ostream& out) { write_histogram_csv(report, out); });
    write_atomic_with(fs::path(opts.out_dir) / "component_stats.csv",
                      [&](std::ostream& out) { write_component_stats_csv(report, out); });
    std::cout << "method=" << report.method << " reps=" << report.replications
              << " accuracy=" << report.accuracy() << " failures=" << report.failures
              << " elapsed=" << report.elapsed_seconds << "s\n";
    return 0;
}

int cmd_profile(int n, int grid_count, const CommonOptions& opts) {
    const DatasetSpec spec = single_gaussian_spec(n, opts.seed);
    const Matrix data = generate(spec);
    const ProfileCurve curve =
        profile_weight_curve(data, default_profile_grid(grid_count), opts.em());

    fs::create_directories(opts.out_dir);
    write_atomic_with(fs::path(opts.out_dir) / "profile.csv",
                      [&](std::ostream& out) { write_profile_csv(curve, out); });
    std::cout << "profile: " << curve.pi1.size() << " grid points, fit_r2=" << curve.fit_r2
              << " fit_slope=" << curve.fit_slope << '\n';
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Penalized maximum-likelihood order selection for Gaussian mixtures"};
    app.require_subcommand(1);

    // simulate
    CommonOptions sim_opts;
    int sim_example = 1;
    int sim_n = 0;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim->add_option("--example", sim_example, "experiment id")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    sim->add_option("--n", sim_n, "sample size (default: the experiment's)");
    add_common(sim, sim_opts);

    // fit
    CommonOptions fit_opts;
    std::string fit_csv, fit_penalty = "logeps";
    bool fit_header = false;
    std::vector<int> fit_columns;
    double fit_lambda = 0.0;
    int fit_m_init = 10;
    auto* fit = app.add_subcommand("fit", "penalized EM fit at a fixed lambda");
    fit->add_option("--csv", fit_csv, "input data")->required()->check(CLI::ExistingFile);
    fit->add_flag("--header", fit_header, "skip one header line");
    fit->add_option("--columns", fit_columns, "0-based column selection");
    fit->add_option("--penalty", fit_penalty)->check(CLI::IsMember({"logeps", "scad"}));
    fit->add_option("--lambda", fit_lambda, "tuning parameter")->required();
    fit->add_option("--m-init", fit_m_init, "initial component count");
    add_common(fit, fit_opts);

    // select
    CommonOptions sel_opts;
    std::string sel_csv, sel_penalty = "logeps";
    bool sel_header = false;
    std::vector<int> sel_columns;
    int sel_m_init = 10;
    int sel_grid = 20;
    auto* sel = app.add_subcommand("select", "BIC-tuned order selection over a lambda grid");
    sel->add_option("--csv", sel_csv, "input data")->required()->check(CLI::ExistingFile);
    sel->add_flag("--header", sel_header, "skip one header line");
    sel->add_option("--columns", sel_columns, "0-based column selection");
    sel->add_option("--penalty", sel_penalty)->check(CLI::IsMember({"logeps", "scad"}));
    sel->add_option("--m-init", sel_m_init, "initial component count");
    sel->add_option("--grid-count", sel_grid, "lambda grid size")->check(CLI::Range(2, 1000));
    add_common(sel, sel_opts);

    // bench
    CommonOptions bench_opts;
    int bench_example = 1;
    int bench_n = 0;
    std::string bench_method = "logeps";
    int bench_reps = 50;
    int bench_m_init = 10;
    int bench_grid = 20;
    int bench_threads = 1;
    auto* bench = app.add_subcommand("bench", "replication experiment");
    bench->add_option("--example", bench_example)->required()->check(CLI::IsMember({1, 2}));
    bench->add_option("--n", bench_n, "sample size (default: the experiment's)");
    bench->add_option("--method", bench_method)
        ->check(CLI::IsMember({"logeps", "scad", "aic", "bic"}));
    bench->add_option("--reps", bench_reps)->check(CLI::PositiveNumber);
    bench->add_option("--m-init", bench_m_init);
    bench->add_option("--grid-count", bench_grid)->check(CLI::Range(2, 1000));
    bench->add_option("--threads", bench_threads)->check(CLI::PositiveNumber);
    add_common(bench, bench_opts);

    // profile
    CommonOptions prof_opts;
    int prof_n = 1000;
    int prof_grid = 28;
    auto* prof = app.add_subcommand("profile", "frozen-weight likelihood profile");
    prof->add_option("--n", prof_n)->check(CLI::PositiveNumber);
    prof->add_option("--grid-count", prof_grid)->check(CLI::Range(2, 1000));
    add_common(prof, prof_opts);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sim) return cmd_simulate(sim_example, sim_n, sim_opts);
        if (*fit) {
            return cmd_fit(fit_csv, fit_header, fit_columns, fit_penalty, fit_lambda,
                           fit_m_init, fit_opts);
        }
        if (*sel) {
            return cmd_select(sel_csv, sel_header, sel_columns, sel_penalty, sel_m_init,
                              sel_grid, sel_opts);
        }
        if (*bench) {
            return cmd_bench(bench_example, bench_n, bench_method, bench_reps, bench_m_init,
                             bench_grid, bench_threads, bench_opts);
        }
        if (*prof) return cmd_profile(prof_n, prof_grid, prof_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace mixsel
