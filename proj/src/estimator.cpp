#include "branchmc/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "branchmc/branching.hpp"
#include "branchmc/errors.hpp"
#include "branchmc/path_simulator.hpp"
#include "branchmc/rng.hpp"

namespace branchmc {

namespace {

constexpr std::uint64_t kBlockSize = 1024;

struct BlockStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double alive = 0.0;
    double branchings = 0.0;
    std::uint64_t extinct = 0;
    std::uint64_t failures = 0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    // Chan et al. pairwise update; applied in block order only.
    void merge(const BlockStats& o) {
        if (o.count == 0) {
            failures += o.failures;
            return;
        }
        const double n1 = static_cast<double>(count);
        const double n2 = static_cast<double>(o.count);
        const double delta = o.mean - mean;
        const double n = n1 + n2;
        mean += delta * n2 / n;
        m2 += o.m2 + delta * delta * n1 * n2 / n;
        count += o.count;
        alive += o.alive;
        branchings += o.branchings;
        extinct += o.extinct;
        failures += o.failures;
    }
};

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(begin, end) over fixed blocks of [0, n) on `threads` workers and
// merges the block results in block order.
template <class Body>
BlockStats run_blocks(std::uint64_t n, unsigned threads, Body&& body) {
    const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<BlockStats> results(blocks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks || failed.load()) return;
            try {
                results[b] = body(b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    BlockStats total;
    for (const auto& r : results) total.merge(r);
    return total;
}

}  // namespace

StartPoint StartPoint::initial(const ProblemSpec& spec) {
    return {0.0, DiscretePath::constant(0.0, spec.x0())};
}

double default_dt(const ProblemSpec& spec) { return spec.horizon() / 50.0; }

namespace {

SampleOutcome run_sample(const ProblemSpec& spec, const StartPoint& start, double dt,
                         std::uint64_t seed, std::uint64_t sample, std::size_t cap,
                         SampleTrace* trace) {
    const double t0 = start.time;
    const double horizon = spec.horizon() - t0;
    if (!(horizon > 0.0)) throw InvalidSpec("start time must precede the horizon");

    RandomStream clock({seed, sample, kTreeStream});
    const ParticleTree tree = simulate_tree(spec.beta(), spec.offspring(), horizon, clock, cap);

    SampleOutcome out;
    out.n_alive = tree.alive_count();
    out.n_branchings = tree.branchings();
    out.extinct = tree.extinct();

    const std::size_t n = tree.particles.size();
    // Event that ended each particle (0 = survived to the horizon).
    std::vector<std::uint32_t> death_event(n, 0);
    for (std::size_t e = 0; e < tree.events.size(); ++e)
        death_event[tree.events[e].brancher] = static_cast<std::uint32_t>(e + 1);

    const LineagePath root_parent(start.history);
    std::vector<LineagePath> lineage(n);
    std::vector<DiscretePath> full(n);

    // Product kept as mantissa * 2^exponent; frexp/ldexp are exact, so deep
    // trees cannot overflow and a single factor round-trips bit-exactly.
    double mantissa = 1.0;
    long exponent = 0;
    double sign = 1.0;
    auto multiply = [&](double f) {
        if (f == 0.0) {
            sign = 0.0;
            return;
        }
        int e = 0;
        mantissa = std::frexp(mantissa * f, &e);
        exponent += e;
    };

    if (trace) trace->paths.assign(n, DiscretePath());
    for (std::uint32_t id = 0; id < n && (sign != 0.0 || trace); ++id) {
        const ParticleRecord& rec = tree.particles[id];
        const bool is_root = rec.parent < 0;
        const auto parent = static_cast<std::size_t>(is_root ? 0 : rec.parent);
        RandomStream rng({seed, sample, rec.stream});
        ExtendedLineage ext =
            is_root ? extend_lineage(root_parent, start.history, t0, t0 + rec.end, spec, dt, rng)
                    : extend_lineage(lineage[parent], full[parent], t0 + rec.birth, t0 + rec.end,
                                     spec, dt, rng);

        if (trace) trace->paths[id] = ext.full;
        if (rec.alive) {
            multiply(spec.payoff(ext.full));
        } else {
            const BranchEvent& ev = tree.events[death_event[id] - 1];
            const double weight = spec.coeff(ev.offspring, t0 + ev.time, ext.full) /
                                  spec.offspring()[ev.offspring];
            multiply(weight);
            if (ev.offspring > 0) {
                lineage[id] = std::move(ext.lineage);
                full[id] = std::move(ext.full);
            }
        }
        // Children of one event are consecutive; release the parent after the last.
        if (!trace && !is_root && rec.rank == tree.events[death_event[parent] - 1].offspring) {
            lineage[parent] = LineagePath();
            full[parent] = DiscretePath();
        }
    }
    out.psi = sign == 0.0 ? 0.0
                          : std::ldexp(mantissa, static_cast<int>(std::clamp(exponent, -100000L, 100000L)));
    if (!std::isfinite(out.psi)) throw NonFiniteState(spec.horizon());
    if (trace) {
        trace->tree = tree;
        trace->outcome = out;
    }
    return out;
}

}  // namespace

SampleOutcome sample_psi(const ProblemSpec& spec, const StartPoint& start, double dt,
                         std::uint64_t seed, std::uint64_t sample, std::size_t cap) {
    return run_sample(spec, start, dt, seed, sample, cap, nullptr);
}

SampleTrace trace_sample(const ProblemSpec& spec, const StartPoint& start, double dt,
                         std::uint64_t seed, std::uint64_t sample, std::size_t cap) {
    SampleTrace t;
    run_sample(spec, start, dt, seed, sample, cap, &t);
    return t;
}

EstimateReport estimate(const ProblemSpec& spec, const StartPoint& start,
                        const EstimateOptions& opt) {
    if (opt.samples < 2) throw InvalidSpec("need at least two samples");
    const double dt = opt.dt > 0.0 ? opt.dt : default_dt(spec);
    const auto t_begin = std::chrono::steady_clock::now();

    const BlockStats total =
        run_blocks(opt.samples, resolve_threads(opt.threads), [&](std::uint64_t b, std::uint64_t e) {
            BlockStats s;
            for (std::uint64_t i = b; i < e; ++i) {
                try {
                    const SampleOutcome o =
                        sample_psi(spec, start, dt, opt.seed, i, opt.population_cap);
                    s.add(o.psi);
                    s.alive += static_cast<double>(o.n_alive);
                    s.branchings += static_cast<double>(o.n_branchings);
                    s.extinct += o.extinct ? 1 : 0;
                } catch (const PopulationCap&) {
                    ++s.failures;
                } catch (const NonFiniteState&) {
                    ++s.failures;
                }
            }
            return s;
        });

    if (static_cast<double>(total.failures) >
        opt.max_failure_fraction * static_cast<double>(opt.samples)) {
        throw EstimationAborted(std::to_string(total.failures) + " of " +
                                std::to_string(opt.samples) + " samples failed");
    }
    if (total.count < 2) throw EstimationAborted("fewer than two successful samples");

    EstimateReport r;
    const double count = static_cast<double>(total.count);
    r.mean = total.mean;
    r.variance = total.m2 / (count - 1.0);
    r.std_error = std::sqrt(r.variance / count);
    r.samples = total.count;
    r.failures = total.failures;
    r.mean_alive = total.alive / count;
    r.mean_branchings = total.branchings / count;
    r.extinct_fraction = static_cast<double>(total.extinct) / count;
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    r.beta = spec.beta();
    r.offspring = spec.offspring();
    r.dt = dt;
    r.seed = opt.seed;
    return r;
}

EstimateReport estimate(const ProblemSpec& spec, const EstimateOptions& options) {
    return estimate(spec, StartPoint::initial(spec), options);
}

std::string EstimateReport::to_key_values() const {
    std::ostringstream os;
    os.precision(10);
    os << "mean = " << mean << '\n'
       << "std_error = " << std_error << '\n'
       << "samples = " << samples << '\n'
       << "failures = " << failures << '\n'
       << "mean_alive = " << mean_alive << '\n'
       << "mean_branchings = " << mean_branchings << '\n'
       << "extinct_fraction = " << extinct_fraction << '\n'
       << "elapsed = " << elapsed << '\n'
       << "beta = " << beta << '\n'
       << "offspring = ";
    for (std::size_t k = 0; k < offspring.size(); ++k) os << (k ? ", " : "") << offspring[k];
    os << '\n' << "dt = " << dt << '\n' << "seed = " << seed << '\n';
    return os.str();
}

std::string EstimateReport::csv_header() {
    return "mean,std_error,samples,failures,mean_alive,mean_branchings,elapsed,beta,dt,seed";
}

std::string EstimateReport::to_csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << mean << ',' << std_error << ',' << samples << ',' << failures << ',' << mean_alive << ','
       << mean_branchings << ',' << elapsed << ',' << beta << ',' << dt << ',' << seed;
    return os.str();
}

TowerCheckResult tower_check(const ProblemSpec& spec, double s, std::uint64_t outer,
                             std::uint64_t inner, double dt, std::uint64_t seed,
                             unsigned threads) {
    if (!(s > 0.0 && s < spec.horizon())) throw InvalidSpec("intermediate time outside (0, T)");
    if (dt <= 0.0) dt = default_dt(spec);

    EstimateOptions direct;
    direct.samples = outer;
    direct.dt = dt;
    direct.seed = derive_seed(seed, 1);
    direct.threads = threads;
    const EstimateReport lhs = estimate(spec, direct);

    const std::uint64_t rhs_seed = derive_seed(seed, 2);
    const BlockStats rhs =
        run_blocks(outer, resolve_threads(threads), [&](std::uint64_t b, std::uint64_t e) {
            BlockStats st;
            for (std::uint64_t i = b; i < e; ++i) {
                RandomStream clock({rhs_seed, i, kTreeStream});
                const double t1 = spec.beta() > 0.0 ? clock.exponential(spec.beta())
                                                    : std::numeric_limits<double>::infinity();
                const std::uint32_t count = sample_offspring(spec.offspring(), clock.uniform());

                RandomStream root({rhs_seed, i, 0});
                DiscretePath x = DiscretePath::constant(0.0, spec.x0());
                const double stop = std::min(t1, s);
                advance_euler(spec, x, stop, dt, root);

                auto inner_value = [&](std::uint64_t j) {
                    EstimateOptions o;
                    o.samples = inner;
                    o.dt = dt;
                    o.seed = derive_seed(seed, 3 + i, j);
                    o.threads = 1;
                    return estimate(spec, StartPoint{stop, x}, o).mean;
                };

                double value;
                if (t1 > s) {
                    value = inner_value(0);
                } else {
                    value = spec.coeff(count, t1, x) / spec.offspring()[count];
                    for (std::uint32_t j = 1; j <= count && value != 0.0; ++j)
                        value *= inner_value(j);
                }
                st.add(value);
            }
            return st;
        });

    TowerCheckResult r;
    r.lhs = lhs.mean;
    r.lhs_se = lhs.std_error;
    r.rhs = rhs.mean;
    r.rhs_se = std::sqrt(rhs.m2 / static_cast<double>(rhs.count - 1) / static_cast<double>(rhs.count));
    r.z = (r.lhs - r.rhs) / std::hypot(r.lhs_se, r.rhs_se);
    return r;
}

}  // namespace branchmc
