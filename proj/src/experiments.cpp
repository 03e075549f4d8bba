#include "branchmc/experiments.hpp"

#include <chrono>
#include <sstream>

#include "branchmc/catalog.hpp"
#include "branchmc/errors.hpp"
#include "branchmc/estimator.hpp"
#include "branchmc/feasibility.hpp"
#include "branchmc/rng.hpp"

namespace branchmc::experiments {

namespace {

std::vector<Coefficient> quadratic_coeffs(QuadraticSign sign) {
    const double a2 = sign == QuadraticSign::Plus ? 1.0 : -1.0;
    return {{catalog::constant(0.0), 0.0}, {catalog::constant(0.0), 0.0},
            {catalog::constant(a2), 1.0}};
}

}  // namespace

ProblemSpec asian_instance(std::size_t factors, double horizon, QuadraticSign sign, double beta,
                           double sigma) {
    ProblemData d;
    d.dim = factors;
    d.horizon = horizon;
    d.beta = beta;
    d.coeffs = quadratic_coeffs(sign);
    d.offspring = {0.0, 0.0, 1.0};
    d.drift = catalog::zero_drift();
    d.vol = catalog::geometric_vol(sigma);
    d.payoff = catalog::call_on_average(1.0);
    d.payoff_bound = 1.0;
    d.x0.assign(factors, 1.0);
    return ProblemSpec(std::move(d));
}

ProblemSpec constant_payoff_instance(double horizon, QuadraticSign sign, double beta) {
    ProblemData d;
    d.dim = 1;
    d.horizon = horizon;
    d.beta = beta;
    d.coeffs = quadratic_coeffs(sign);
    d.offspring = {0.0, 0.0, 1.0};
    d.drift = catalog::zero_drift();
    d.vol = catalog::geometric_vol(0.2);
    d.payoff = catalog::constant_payoff(0.5);
    d.payoff_bound = 0.5;
    d.x0 = {1.0};
    return ProblemSpec(std::move(d));
}

TableSpec table_spec(int id) {
    switch (id) {
        case 1: return {1, 1, 2.0};
        case 2: return {2, 1, 5.0};
        case 3: return {3, 4, 2.0};
        case 4: return {4, 4, 5.0};
        default: throw ConfigError("table id must be 1..4, got " + std::to_string(id));
    }
}

std::vector<TableRow> run_table(int id, const TableOptions& opt) {
    const TableSpec ts = table_spec(id);
    const ProblemSpec pde1 = asian_instance(ts.factors, ts.horizon, QuadraticSign::Plus, opt.beta);
    const ProblemSpec pde2 = asian_instance(ts.factors, ts.horizon, QuadraticSign::Minus, opt.beta);

    for (const ProblemSpec* spec : {&pde1, &pde2}) {
        const EllAnalysis a = classify(*spec);
        if (!a.feasible()) throw FeasibilityRejected(describe(a));
    }

    std::vector<TableRow> rows;
    for (int n = opt.n_min; n <= opt.n_max; n += opt.n_step) {
        const auto start = std::chrono::steady_clock::now();
        EstimateOptions eo;
        eo.samples = std::uint64_t{1} << n;
        eo.dt = opt.dt;
        eo.threads = opt.threads;
        eo.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(n));
        const EstimateReport r1 = estimate(pde1, eo);
        const EstimateReport r2 = estimate(pde2, eo);
        TableRow row;
        row.n = n;
        row.fair_pde1_pct = 100.0 * r1.mean;
        row.stdev_pde1_pct = 100.0 * r1.std_error;
        row.fair_pde2_pct = 100.0 * r2.mean;
        row.stdev_pde2_pct = 100.0 * r2.std_error;
        row.mean_alive = r1.mean_alive;
        row.cpu_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(row);
    }
    return rows;
}

std::string table_csv(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    os << kTableHeader << '\n';
    os.setf(std::ios::fixed);
    for (const auto& r : rows) {
        os.precision(6);
        os << r.n << ',' << r.fair_pde1_pct << ',' << r.stdev_pde1_pct << ',' << r.fair_pde2_pct
           << ',' << r.stdev_pde2_pct << ',';
        os.precision(3);
        os << r.cpu_seconds << '\n';
    }
    return os.str();
}

FdProblem asian_fd_problem(double horizon, QuadraticSign sign, double beta, double sigma) {
    FdProblem p;
    p.sigma = sigma;
    p.beta = beta;
    p.sign = sign;
    p.horizon = horizon;
    p.x0 = 1.0;
    p.truncation = 4.0;
    p.payoff = [horizon](double, double a) { return catalog::positive_part(a / horizon - 1.0); };
    return p;
}

FdGrid asian_fd_grid(const FdProblem& pde, std::size_t nx, std::size_t na) {
    FdGrid g;
    g.x_max = default_x_max(pde);
    g.nx = nx;
    g.a_max = 3.0 * pde.horizon;
    g.na = na;
    g.time_steps = stable_time_steps(pde, g);
    return g;
}

}  // namespace branchmc::experiments
