// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "branchmc/branching.hpp"
#include "branchmc/catalog.hpp"
#include "branchmc/estimator.hpp"
#include "branchmc/experiments.hpp"
#include "branchmc/feasibility.hpp"
#include "branchmc/path_simulator.hpp"
#include "branchmc/reference.hpp"
#include "branchmc/rng.hpp"

using namespace branchmc;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr int kTableN = 22;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
    std::string id;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Every certified estimate is also checked against |mean| <= R0 + 5 se.
struct BoundLog {
    std::vector<std::string> entries;
    bool pass = true;

    EstimateReport run(const std::string& label, const ProblemSpec& spec, const EstimateOptions& o) {
        const EstimateReport r = estimate(spec, o);
        const EllAnalysis a = classify(spec);
        if (a.feasible()) {
            const bool ok = std::fabs(r.mean) <= a.r0 + 5 * r.std_error;
            pass = pass && ok;
            entries.push_back(fmt("%s %s |mean|=%.6f R0=%.6f se=%.2e", ok ? "ok  " : "FAIL",
                                  label.c_str(), std::fabs(r.mean), a.r0, r.std_error));
        }
        return r;
    }
};

BoundLog bounds;

EstimateOptions options(int log2_samples, std::uint64_t seed) {
    EstimateOptions o;
    o.samples = std::uint64_t{1} << log2_samples;
    o.seed = seed;
    o.threads = 0;
    return o;
}

Criterion ac1() {
    Criterion c{"AC1", "closed-form parity, constant payoff 1/2"};
    const auto t0 = Clock::now();
    std::uint64_t s = 1;
    for (double T : {2.0, 5.0}) {
        for (QuadraticSign sign : {QuadraticSign::Plus, QuadraticSign::Minus}) {
            const ProblemSpec spec = experiments::constant_payoff_instance(T, sign);
            const EstimateReport r = bounds.run("constant", spec, options(20, derive_seed(kSeed, 1, s++)));
            const double exact = constant_payoff_solution(0.1, T, sign);
            const double z = (r.mean - exact) / r.std_error;
            c.check(std::fabs(z) <= 3.0,
                    fmt("T=%g %s mean=%.6f exact=%.6f se=%.2e z=%+.2f", T,
                        sign == QuadraticSign::Plus ? "+y^2" : "-y^2", r.mean, exact, r.std_error, z));
        }
    }
    const double t = seconds_since(t0);
    c.check(t <= 60.0, fmt("runtime %.1fs <= 60s", t));
    return c;
}

struct TableResult {
    EstimateReport pde1, pde2;
    double seconds;
};

TableResult table_run(int id) {
    const auto spec = experiments::table_spec(id);
    const auto t0 = Clock::now();
    const EstimateOptions o = options(kTableN, derive_seed(kSeed, 100 + id));
    TableResult r;
    r.pde1 = bounds.run(fmt("table%d pde1", id),
                        experiments::asian_instance(spec.factors, spec.horizon, QuadraticSign::Plus), o);
    r.pde2 = bounds.run(fmt("table%d pde2", id),
                        experiments::asian_instance(spec.factors, spec.horizon, QuadraticSign::Minus), o);
    r.seconds = seconds_since(t0);
    return r;
}

void check_window(Criterion& c, const char* label, const EstimateReport& r, double lo, double hi,
                  double paper) {
    const double v = 100.0 * r.mean, se = 100.0 * r.std_error;
    c.check(v >= lo && v <= hi,
            fmt("%s %.4f%% in [%.2f, %.2f] (paper %.2f, se %.4f%%)", label, v, lo, hi, paper, se));
}

Criterion ac2() {
    Criterion c{"AC2", "table 1 (1 factor, T=2), 2^22 samples"};
    const TableResult r = table_run(1);
    check_window(c, "PDE1", r.pde1, 5.51, 5.57, 5.54);
    check_window(c, "PDE2", r.pde2, 5.14, 5.20, 5.17);
    c.check(100 * r.pde1.std_error <= 0.01 && 100 * r.pde2.std_error <= 0.01,
            fmt("stdev %.4f%% / %.4f%% <= 0.01%%", 100 * r.pde1.std_error, 100 * r.pde2.std_error));
    c.details.push_back(fmt("cpu %.1fs", r.seconds));
    return c;
}

Criterion ac3() {
    Criterion c{"AC3", "table 2 (1 factor, T=5), 2^22 samples"};
    const TableResult r = table_run(2);
    check_window(c, "PDE1", r.pde1, 7.20, 7.28, 7.24);
    check_window(c, "PDE2", r.pde2, 5.47, 5.55, 5.51);
    c.details.push_back(fmt("cpu %.1fs", r.seconds));
    return c;
}

Criterion ac4() {
    Criterion c{"AC4", "tables 3-4 (4 factors), 2^22 samples"};
    const TableResult t3 = table_run(3);
    check_window(c, "T=2 PDE1", t3.pde1, 2.71, 2.77, 2.74);
    check_window(c, "T=2 PDE2", t3.pde2, 2.62, 2.68, 2.65);
    const TableResult t4 = table_run(4);
    check_window(c, "T=5 PDE1", t4.pde1, 3.35, 3.41, 3.38);
    check_window(c, "T=5 PDE2", t4.pde2, 2.97, 3.03, 3.00);
    for (const auto& [T, r, paper] : {std::tuple{2.0, t3.pde1, 1.22}, std::tuple{5.0, t4.pde1, 1.65}}) {
        const double target = std::exp(0.1 * T);
        c.check(std::fabs(r.mean_alive / target - 1.0) <= 0.02,
                fmt("T=%g mean descendants %.4f vs e^{beta T}=%.4f (paper %.2f)", T, r.mean_alive,
                    target, paper));
    }
    c.details.push_back(fmt("cpu %.1fs + %.1fs", t3.seconds, t4.seconds));
    return c;
}

Criterion ac5() {
    Criterion c{"AC5", "linear limit beta=0 within 3 se of the quoted prices, 2^22 samples"};
    const struct {
        std::size_t factors;
        double T, paper;
    } cases[] = {{1, 2.0, 6.52}, {1, 5.0, 10.24}, {4, 2.0, 3.29}, {4, 5.0, 5.24}};
    std::uint64_t s = 0;
    for (const auto& k : cases) {
        const ProblemSpec spec = experiments::asian_instance(k.factors, k.T, QuadraticSign::Plus, 0.0);
        const EstimateReport r =
            bounds.run("linear", spec, options(kTableN, derive_seed(kSeed, 200, s++)));
        const double v = 100.0 * r.mean, se = 100.0 * r.std_error;
        const double z = (v - k.paper) / se;
        c.check(std::fabs(z) <= 3.0, fmt("%zu factor(s) T=%g: %.4f%% vs %.2f%% se %.4f%% z=%+.2f",
                                         k.factors, k.T, v, k.paper, se, z));
    }
    return c;
}

Criterion ac6() {
    Criterion c{"AC6", "finite-difference oracle within 0.06pp after one refinement"};
    const struct {
        double T;
        QuadraticSign sign;
        double paper;
    } cases[] = {{2.0, QuadraticSign::Plus, 5.54},
                 {2.0, QuadraticSign::Minus, 5.17},
                 {5.0, QuadraticSign::Plus, 7.24},
                 {5.0, QuadraticSign::Minus, 5.51}};
    for (const auto& k : cases) {
        const auto t0 = Clock::now();
        const FdProblem pde = experiments::asian_fd_problem(k.T, k.sign);
        const double coarse = 100 * fd_solve(pde, experiments::asian_fd_grid(pde, 150, 150)).value;
        const double fine = 100 * fd_solve(pde, experiments::asian_fd_grid(pde, 300, 300)).value;
        const char* name = k.sign == QuadraticSign::Plus ? "PDE1" : "PDE2";
        c.check(std::fabs(fine - coarse) <= 0.06,
                fmt("T=%g %s refinement 150^2 -> 300^2: %.4f%% -> %.4f%% (change %.4f)", k.T, name,
                    coarse, fine, fine - coarse));
        c.check(std::fabs(fine - k.paper) <= 0.06,
                fmt("T=%g %s %.4f%% vs %.2f%% (%.1fs)", k.T, name, fine, k.paper, seconds_since(t0)));
    }
    return c;
}

double bernoulli(double psi, double beta, double t) {
    return 1.0 / (psi + (1.0 - psi) * std::exp(beta * t));
}

Criterion ac7() {
    Criterion c{"AC7", "feasibility suite"};
    const auto t0 = Clock::now();
    const EllAnalysis l1 = classify(EllInputs{{0, 0, 1}, 0.5, 0.1, 2.0});
    c.check(l1.regime == Regime::L1, "a2=1, |psi|=0.5: regime " + to_string(l1.regime));

    const double target = std::log(2.0) / 0.1;
    const EllAnalysis inf = classify(EllInputs{{0, 0, 1}, 2.0, 0.1, 8.0});
    const double horizon = inf.blow_up_horizon.value_or(NAN);
    c.check(inf.regime == Regime::Infeasible && std::fabs(horizon - target) <= 0.01,
            fmt("a2=1, |psi|=2, T=8: %s, blow-up horizon %.6f vs ln2/beta=%.6f",
                to_string(inf.regime).c_str(), horizon, target));
    const auto up = integrate_rho(build_ell(EllInputs{{0, 0, 1}, 2.0, 0.1, 8.0}), 8.0, 1e6);
    const double up_time = std::holds_alternative<BlowUp>(up) ? std::get<BlowUp>(up).time : NAN;
    c.check(std::fabs(up_time - target) <= 0.01, fmt("integrator blow-up time %.6f", up_time));

    double err = 0.0;
    if (l1.rho) {
        const DiscretePath& rho = *l1.rho;
        for (std::size_t i = 0; i < rho.size(); ++i)
            err = std::max(err, std::fabs(rho.node(i)[0] - bernoulli(0.5, 0.1, rho.time(i))));
        for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
            const double t = 0.5 * (rho.time(i) + rho.time(i + 1));
            err = std::max(err, std::fabs(rho.coordinate(t, 0) - bernoulli(0.5, 0.1, t)));
        }
    } else {
        err = INFINITY;
    }
    c.check(err <= 1e-7, fmt("rho error vs Bernoulli closed form %.2e <= 1e-7", err));
    const double t = seconds_since(t0);
    c.check(t <= 1.0, fmt("runtime %.3fs <= 1s", t));
    return c;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size(), my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
}

Criterion ac8() {
    Criterion c{"AC8", "property suite"};
    const auto t0 = Clock::now();

    // Tower property at s = 1, 10^4 outer x 10^3 inner samples.
    const struct {
        const char* name;
        ProblemSpec spec;
    } towers[] = {
        {"constant coefficients", experiments::constant_payoff_instance(2.0, QuadraticSign::Plus, 0.4)},
        {"beta=0", experiments::asian_instance(1, 2.0, QuadraticSign::Plus, 0.0)},
        {"average-rate PDE1", experiments::asian_instance(1, 2.0, QuadraticSign::Plus)},
    };
    std::uint64_t s = 0;
    for (const auto& k : towers) {
        const TowerCheckResult t = tower_check(k.spec, 1.0, 10000, 1000, 0.0, derive_seed(kSeed, 300, s++), 0);
        c.check(std::fabs(t.z) <= 3.0, fmt("tower %s: lhs %.6f (%.1e) rhs %.6f (%.1e) z=%+.2f", k.name,
                                           t.lhs, t.lhs_se, t.rhs, t.rhs_se, t.z));
    }

    // Galton-Watson moments, 10^5 trees per law.
    const std::vector<std::vector<double>> laws{{1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0}, {0.3, 0.2, 0.5}};
    for (std::size_t l = 0; l < laws.size(); ++l) {
        const double beta = 0.1, T = 2.0;
        const std::size_t n = 100000;
        double sa = 0, sa2 = 0, sb = 0, sb2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            RandomStream r({derive_seed(kSeed, 400, l), i, kTreeStream});
            const ParticleTree tree = simulate_tree(beta, laws[l], T, r);
            const double a = static_cast<double>(tree.alive_count());
            const double b = static_cast<double>(tree.branchings());
            sa += a, sa2 += a * a, sb += b, sb2 += b * b;
        }
        const double N = static_cast<double>(n);
        const double ma = sa / N, mb = sb / N;
        const double sea = std::sqrt(std::max(0.0, sa2 / N - ma * ma) / (N - 1));
        const double seb = std::sqrt(std::max(0.0, sb2 / N - mb * mb) / (N - 1));
        const PopulationMoments m = population_moments(beta, laws[l], T);
        const bool ok = std::fabs(ma - m.mean_alive) <= std::max(4 * sea, 1e-12) &&
                        std::fabs(mb - m.mean_branchings) <= 4 * seb;
        c.check(ok, fmt("GW law #%zu: N_T %.5f vs %.5f (se %.1e), M_T %.5f vs %.5f (se %.1e)", l, ma,
                        m.mean_alive, sea, mb, m.mean_branchings, seb));
    }

    // Euler strong error slope against the exact lognormal update.
    {
        const double sigma = 0.5, T = 1.0;
        ProblemData d;
        d.dim = 1;
        d.horizon = T;
        d.beta = 0.1;
        d.coeffs = {{catalog::constant(0.0), 0.0}, {catalog::constant(1.0), 1.0}};
        d.offspring = {0.0, 1.0};
        d.drift = catalog::zero_drift();
        d.vol = catalog::geometric_vol(sigma);
        d.payoff = catalog::constant_payoff(1.0);
        d.x0 = {1.0};
        const ProblemSpec spec(d);
        std::vector<double> ldt, lerr;
        for (int level = 3; level <= 7; ++level) {
            const double dt = std::ldexp(1.0, -level);
            double sq = 0.0;
            const int paths = 20000;
            for (int i = 0; i < paths; ++i) {
                RandomStream a({derive_seed(kSeed, 500), static_cast<std::uint64_t>(i), 0});
                RandomStream b = a;
                DiscretePath p = DiscretePath::constant(0.0, spec.x0());
                advance_euler(spec, p, T, dt, a);
                double x = 1.0;
                for (int k = 0; k < (1 << level); ++k)
                    x *= std::exp(-0.5 * sigma * sigma * dt + sigma * std::sqrt(dt) * b.normal());
                sq += (p.back()[0] - x) * (p.back()[0] - x);
            }
            ldt.push_back(std::log(dt));
            lerr.push_back(0.5 * std::log(sq / paths));
        }
        const double sl = slope(ldt, lerr);
        c.check(sl >= 0.4 && sl <= 0.6, fmt("Euler strong error slope %.3f in [0.4, 0.6]", sl));
    }

    // Offspring-law invariance of the mean.
    {
        const ProblemSpec a = experiments::constant_payoff_instance(2.0, QuadraticSign::Plus);
        const ProblemSpec b = a.with_offspring({0.5, 0.0, 0.5});
        const EstimateReport ra = bounds.run("p=(0,0,1)", a, options(18, derive_seed(kSeed, 600, 1)));
        const EstimateReport rb = bounds.run("p=(.5,0,.5)", b, options(18, derive_seed(kSeed, 600, 2)));
        const double z = (ra.mean - rb.mean) / std::hypot(ra.std_error, rb.std_error);
        c.check(std::fabs(z) <= 4.0, fmt("p-invariance: %.6f vs %.6f z=%+.2f (variance %.3e vs %.3e)",
                                         ra.mean, rb.mean, z, ra.variance, rb.variance));
    }

    // Bit-exact determinism across thread counts.
    {
        const ProblemSpec spec = experiments::asian_instance(4, 2.0, QuadraticSign::Minus);
        std::vector<EstimateReport> runs;
        for (unsigned th : {1u, 4u, 16u}) {
            EstimateOptions o = options(15, derive_seed(kSeed, 700));
            o.threads = th;
            runs.push_back(estimate(spec, o));
        }
        const bool same = runs[0].mean == runs[1].mean && runs[0].mean == runs[2].mean &&
                          runs[0].std_error == runs[1].std_error && runs[0].std_error == runs[2].std_error;
        c.check(same, fmt("threads 1/4/16: mean %.17g / %.17g / %.17g", runs[0].mean, runs[1].mean,
                          runs[2].mean));
    }

    c.check(bounds.pass, fmt("|mean| <= R0 + 5 se on %zu certified runs", bounds.entries.size()));
    for (const auto& e : bounds.entries) c.details.push_back("  " + e);
    const double t = seconds_since(t0);
    c.check(t <= 900.0, fmt("runtime %.1fs <= 900s", t));
    return c;
}

}  // namespace

int main() {
    const std::vector<std::function<Criterion()>> suite{ac7, ac1, ac6, ac2, ac3, ac4, ac5, ac8};
    std::vector<Criterion> results;
    int failed = 0;
    for (const auto& run : suite) {
        const auto t0 = Clock::now();
        Criterion c = run();
        std::printf("%s %s: %s (%.1fs)\n", c.id.c_str(), c.pass ? "PASS" : "FAIL", c.title.c_str(),
                    seconds_since(t0));
        for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        failed += c.pass ? 0 : 1;
        results.push_back(std::move(c));
    }
    std::printf("\nsummary\n");
    for (const auto& c : results) std::printf("%s %s\n", c.id.c_str(), c.pass ? "PASS" : "FAIL");
    return failed;
}
