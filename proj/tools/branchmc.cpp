// branchmc: command-line front end.
//
//   branchmc feasibility <config> [--rho-csv FILE]
//   branchmc solve <config> [--samples-log2 N] [--dt D] [--seed S] [--threads K] [--out FILE]
//   branchmc benchmark <name> [--horizon T] ...
//   branchmc table <id> [--n-min A] [--n-max B] ...
//   branchmc convergence <config> [--dt-levels L] [--n-min A] [--n-max B]
//
// Exit codes: 0 success, 2 feasibility rejection, 1 any other error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "branchmc/config.hpp"
#include "branchmc/errors.hpp"
#include "branchmc/estimator.hpp"
#include "branchmc/experiments.hpp"
#include "branchmc/feasibility.hpp"
#include "branchmc/path_simulator.hpp"
#include "branchmc/reference.hpp"

using namespace branchmc;

namespace {

struct RunFlags {
    std::optional<int> samples_log2;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;

    void attach(CLI::App* app) {
        app->add_option("--samples-log2", samples_log2, "use 2^N samples")->check(CLI::Range(1, 40));
        app->add_option("--dt", dt, "Euler step (0 = horizon / 50)")->check(CLI::NonNegativeNumber);
        app->add_option("--seed", seed, "master seed");
        app->add_option("--threads", threads, "worker threads (0 = hardware)");
        app->add_option("--out", out, "CSV output file");
    }

    void apply(RunConfig& c) const {
        if (samples_log2) c.samples_log2 = *samples_log2;
        if (dt) c.dt = *dt;
        if (seed) c.seed = *seed;
        if (threads) c.threads = *threads;
        if (!out.empty()) c.csv = out;
    }
};

EstimateOptions options_from(const RunConfig& c) {
    EstimateOptions o;
    o.samples = std::uint64_t{1} << c.samples_log2;
    o.dt = c.dt;
    o.seed = c.seed;
    o.threads = c.threads;
    o.population_cap = c.population_cap;
    return o;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_file(path, text);
    }
}

EllAnalysis require_feasible(const ProblemSpec& spec) {
    EllAnalysis a = classify(spec);
    if (!a.feasible()) throw FeasibilityRejected(describe(a));
    return a;
}

// Root-only Euler paths; flags payoffs that exceed the declared bound.
void check_declared_bound(const ProblemSpec& spec, double dt, std::uint64_t seed) {
    std::vector<DiscretePath> paths;
    const DiscretePath start = DiscretePath::constant(0.0, spec.x0());
    for (std::uint64_t i = 0; i < 256; ++i) {
        RandomStream rng({derive_seed(seed, 0xB0B), i, 0});
        DiscretePath p = start;
        advance_euler(spec, p, spec.horizon(), dt, rng);
        paths.push_back(std::move(p));
    }
    const double sup = sampled_payoff_sup(spec, paths);
    if (sup > spec.payoff_bound())
        std::cerr << "warning: sampled |psi| reaches " << sup << " above the declared bound "
                  << spec.payoff_bound() << '\n';
}

int cmd_feasibility(const std::string& path, const std::string& rho_csv) {
    const ProblemSpec spec = load_config(path).to_problem();
    const EllAnalysis a = classify(spec);
    std::cout << describe(a);
    std::cout << "variance = " << to_string(variance_radius_check(spec)) << '\n';
    if (const auto m2 = second_moment_bound(spec)) std::cout << "second_moment_bound = " << *m2 << '\n';
    if (!rho_csv.empty() && a.rho) write_file(rho_csv, path_csv(*a.rho));
    return a.feasible() ? 0 : 2;
}

int cmd_solve(const std::string& path, const RunFlags& flags, std::optional<std::uint64_t> dump,
              const std::string& dump_dir) {
    RunConfig cfg = load_config(path);
    flags.apply(cfg);
    const ProblemSpec spec = cfg.to_problem();
    const EllAnalysis a = require_feasible(spec);
    const EstimateOptions opt = options_from(cfg);
    const double dt = opt.dt > 0.0 ? opt.dt : default_dt(spec);
    check_declared_bound(spec, dt, opt.seed);

    const EstimateReport r = estimate(spec, opt);
    std::cout << "regime = " << to_string(a.regime) << '\n' << "r0 = " << a.r0 << '\n'
              << r.to_key_values();
    if (!cfg.csv.empty()) write_file(cfg.csv, EstimateReport::csv_header() + '\n' + r.to_csv_row() + '\n');

    if (dump) {
        namespace fs = std::filesystem;
        fs::create_directories(dump_dir);
        const SampleTrace t =
            trace_sample(spec, StartPoint::initial(spec), dt, opt.seed, *dump, opt.population_cap);
        write_file((fs::path(dump_dir) / "tree.txt").string(), t.tree.dump());
        for (std::size_t id = 0; id < t.paths.size(); ++id)
            write_file((fs::path(dump_dir) / ("particle_" + std::to_string(id) + ".csv")).string(),
                       path_csv(t.paths[id]));
    }
    return 0;
}

int cmd_benchmark(const std::string& name, double horizon, const RunFlags& flags, std::size_t nx,
                  std::size_t na) {
    std::ostringstream os;
    os.precision(10);
    if (name == "constant-plus" || name == "constant-minus") {
        const QuadraticSign sign = name == "constant-plus" ? QuadraticSign::Plus : QuadraticSign::Minus;
        const ProblemSpec spec = experiments::constant_payoff_instance(horizon, sign);
        require_feasible(spec);
        RunConfig cfg;
        cfg.samples_log2 = 20;
        flags.apply(cfg);
        const EstimateReport r = estimate(spec, options_from(cfg));
        const double exact = constant_payoff_solution(spec.beta(), horizon, sign);
        os << "benchmark = " << name << '\n' << "horizon = " << horizon << '\n'
           << "closed_form = " << exact << '\n' << r.to_key_values()
           << "z = " << (r.mean - exact) / r.std_error << '\n';
    } else if (name == "fd-pde1" || name == "fd-pde2") {
        const QuadraticSign sign = name == "fd-pde1" ? QuadraticSign::Plus : QuadraticSign::Minus;
        const FdProblem pde = experiments::asian_fd_problem(horizon, sign);
        const auto start = std::chrono::steady_clock::now();
        const FdResult res = fd_solve(pde, experiments::asian_fd_grid(pde, nx, na));
        os << "benchmark = " << name << '\n' << "horizon = " << horizon << '\n'
           << "value_pct = " << 100.0 * res.value << '\n' << "nx = " << res.grid.nx << '\n'
           << "na = " << res.grid.na << '\n' << "x_max = " << res.grid.x_max << '\n'
           << "a_max = " << res.grid.a_max << '\n' << "time_steps = " << res.grid.time_steps << '\n'
           << "stability = " << res.stability << '\n' << "cpu_seconds = "
           << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
           << '\n';
    } else {
        throw ConfigError("unknown benchmark '" + name +
                          "' (constant-plus, constant-minus, fd-pde1, fd-pde2)");
    }
    emit(flags.out, os.str());
    return 0;
}

int cmd_table(int id, experiments::TableOptions opt, const RunFlags& flags) {
    if (flags.dt) opt.dt = *flags.dt;
    if (flags.seed) opt.seed = *flags.seed;
    if (flags.threads) opt.threads = *flags.threads;
    if (flags.samples_log2) opt.n_min = opt.n_max = *flags.samples_log2;
    emit(flags.out, experiments::table_csv(experiments::run_table(id, opt)));
    return 0;
}

int cmd_convergence(const std::string& path, const RunFlags& flags, int dt_levels, int n_min,
                    int n_max) {
    RunConfig cfg = load_config(path);
    flags.apply(cfg);
    const ProblemSpec spec = cfg.to_problem();
    require_feasible(spec);

    std::ostringstream os;
    os.precision(12);
    os << "sweep,N,dt,mean,std_error,cpu_seconds\n";
    auto row = [&](const char* sweep, int n, double dt) {
        EstimateOptions o = options_from(cfg);
        o.samples = std::uint64_t{1} << n;
        o.dt = dt;
        const EstimateReport r = estimate(spec, o);
        os << sweep << ',' << n << ',' << r.dt << ',' << r.mean << ',' << r.std_error << ','
           << r.elapsed << '\n';
    };
    const double dt0 = spec.horizon() / 5.0;
    for (int l = 0; l < dt_levels; ++l) row("dt", cfg.samples_log2, dt0 / std::ldexp(1.0, l));
    for (int n = n_min; n <= n_max; ++n) row("N", n, cfg.dt);
    emit(cfg.csv, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching-diffusion Monte Carlo for semilinear path-dependent PDEs"};
    app.require_subcommand(1);

    std::string config_path, rho_csv;

    auto* feas = app.add_subcommand("feasibility", "classify the comparison function");
    feas->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    feas->add_option("--rho-csv", rho_csv, "write the rho trajectory");

    RunFlags solve_flags;
    std::optional<std::uint64_t> dump_sample;
    std::string dump_dir = "trace";
    auto* solve = app.add_subcommand("solve", "estimate the value at (0, x0)");
    solve->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    solve_flags.attach(solve);
    solve->add_option("--dump-sample", dump_sample, "write tree and paths of one sample");
    solve->add_option("--dump-dir", dump_dir, "directory for --dump-sample");

    RunFlags bench_flags;
    std::string bench_name;
    double horizon = 2.0;
    std::size_t nx = 200, na = 200;
    auto* bench = app.add_subcommand("benchmark", "closed-form and finite-difference references");
    bench->add_option("name", bench_name, "constant-plus | constant-minus | fd-pde1 | fd-pde2")
        ->required();
    bench->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
    bench->add_option("--nx", nx)->check(CLI::Range(1, 100000));
    bench->add_option("--na", na)->check(CLI::Range(2, 100000));
    bench_flags.attach(bench);

    RunFlags table_flags;
    int table_id = 1;
    experiments::TableOptions table_opt;
    auto* table = app.add_subcommand("table", "reproduce one of the price tables as CSV");
    table->add_option("id", table_id)->required()->check(CLI::Range(1, 4));
    table->add_option("--n-min", table_opt.n_min)->check(CLI::Range(1, 40));
    table->add_option("--n-max", table_opt.n_max)->check(CLI::Range(1, 40));
    table->add_option("--n-step", table_opt.n_step)->check(CLI::Range(1, 40));
    table->add_option("--beta", table_opt.beta)->check(CLI::NonNegativeNumber);
    table_flags.attach(table);

    RunFlags conv_flags;
    int dt_levels = 5, n_min = 10, n_max = 16;
    auto* conv = app.add_subcommand("convergence", "dt and sample-count sweeps as CSV");
    conv->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    conv->add_option("--dt-levels", dt_levels)->check(CLI::Range(1, 20));
    conv->add_option("--n-min", n_min)->check(CLI::Range(1, 40));
    conv->add_option("--n-max", n_max)->check(CLI::Range(1, 40));
    conv_flags.attach(conv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*feas) return cmd_feasibility(config_path, rho_csv);
        if (*solve) return cmd_solve(config_path, solve_flags, dump_sample, dump_dir);
        if (*bench) return cmd_benchmark(bench_name, horizon, bench_flags, nx, na);
        if (*table) return cmd_table(table_id, table_opt, table_flags);
        if (*conv) return cmd_convergence(config_path, conv_flags, dt_levels, n_min, n_max);
    } catch (const FeasibilityRejected& e) {
        std::cerr << "feasibility rejected\n" << e.what();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
