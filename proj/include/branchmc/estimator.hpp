#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "branchmc/branching.hpp"
#include "branchmc/path.hpp"
#include "branchmc/problem.hpp"

namespace branchmc {

/// Starting point (t, x) of the representation: the known path on [0, t].
struct StartPoint {
    double time = 0.0;
    DiscretePath history;

    static StartPoint initial(const ProblemSpec& spec);
};

struct SampleOutcome {
    double psi = 0.0;            ///< one realization of the marked product
    std::size_t n_alive = 0;     ///< N_T
    std::size_t n_branchings = 0;  ///< M_T
    bool extinct = false;
};

/// One tree plus lineages; returns prod_n a_{I_n}(T_n, X^{K_n}) / p_{I_n} times
/// prod_{alive} psi(X^k). Streams are (seed, sample, particle).
SampleOutcome sample_psi(const ProblemSpec& spec, const StartPoint& start, double dt,
                         std::uint64_t seed, std::uint64_t sample,
                         std::size_t population_cap = 1'000'000);

struct SampleTrace {
    ParticleTree tree;
    std::vector<DiscretePath> paths;  ///< full path of each particle, by id
    SampleOutcome outcome;
};

/// Replays sample_psi for one sample and keeps the tree and every particle
/// path. Draws are identical to sample_psi.
SampleTrace trace_sample(const ProblemSpec& spec, const StartPoint& start, double dt,
                         std::uint64_t seed, std::uint64_t sample,
                         std::size_t population_cap = 1'000'000);

struct EstimateOptions {
    std::uint64_t samples = 1u << 16;
    double dt = 0.0;  ///< 0 selects horizon / 50
    std::uint64_t seed = 1;
    unsigned threads = 0;  ///< 0 selects hardware concurrency
    std::size_t population_cap = 1'000'000;
    double max_failure_fraction = 1e-4;
};

struct EstimateReport {
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t failures = 0;
    double mean_alive = 0.0;
    double mean_branchings = 0.0;
    double extinct_fraction = 0.0;
    double elapsed = 0.0;
    // config echo
    double beta = 0.0;
    std::vector<double> offspring;
    double dt = 0.0;
    std::uint64_t seed = 0;

    std::string to_key_values() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

double default_dt(const ProblemSpec& spec);

/// Mean and standard error of sample_psi over options.samples i.i.d. draws.
/// Bit-identical for a fixed (seed, samples, dt) regardless of threads.
/// Throws EstimationAborted when failures exceed max_failure_fraction.
EstimateReport estimate(const ProblemSpec& spec, const StartPoint& start,
                        const EstimateOptions& options);
EstimateReport estimate(const ProblemSpec& spec, const EstimateOptions& options);

struct TowerCheckResult {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double z = 0.0;
};

/// Compares v(0, x0) with the first-branch decomposition at the fixed time s:
/// E[v(s, X) 1{T1 > s} + a_{I1}/p_{I1} prod_{j<=I1} v_j(T1, X) 1{T1 <= s}],
/// each v estimated by an independent inner run.
TowerCheckResult tower_check(const ProblemSpec& spec, double s, std::uint64_t outer,
                             std::uint64_t inner, double dt, std::uint64_t seed,
                             unsigned threads = 0);

}  // namespace branchmc
