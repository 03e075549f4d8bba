#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "branchmc/rng.hpp"

namespace branchmc {

/// Particle label (k_1, ..., k_n), entries in {1..n0}.
using IndexTuple = std::vector<std::uint32_t>;

/// c((k_1..k_n)) = sum_i k_i (n0+1)^i, exact.
boost::multiprecision::cpp_int index_code(std::span<const std::uint32_t> tuple, std::uint32_t n0);

struct ParticleRecord {
    double birth = 0.0;
    /// Branch (death) time, or the horizon for particles alive at the end.
    double end = 0.0;
    /// Parent particle id; -1 for the root.
    std::int64_t parent = -1;
    /// 1-based rank among the parent's offspring (1 for the root).
    std::uint32_t rank = 1;
    /// Event number at which this particle was born (0 for the root).
    std::uint32_t birth_event = 0;
    /// Independent Brownian stream for this particle (its birth counter).
    std::uint32_t stream = 0;
    bool alive = false;
};

struct BranchEvent {
    double time = 0.0;        ///< T_n, relative to the start of the tree
    std::uint32_t brancher;   ///< particle id of K_n
    std::uint32_t offspring;  ///< I_n
};

/// Realized birth-death genealogy on [0, horizon]. Particle ids are birth
/// order; children of one event get consecutive ids.
class ParticleTree {
public:
    double horizon = 0.0;
    std::uint32_t n0 = 0;
    std::vector<BranchEvent> events;
    std::vector<ParticleRecord> particles;
    /// Ids alive at the horizon, in increasing order.
    std::vector<std::uint32_t> alive;

    std::size_t branchings() const noexcept { return events.size(); }
    std::size_t alive_count() const noexcept { return alive.size(); }
    bool extinct() const noexcept { return alive.empty(); }

    /// Label of particle id during [T_event, T_{event+1}); requires the
    /// particle to be alive then. Materialized from parent links.
    IndexTuple tuple(std::uint32_t id, std::size_t event) const;
    /// K_n for event n (1-based).
    IndexTuple brancher_tuple(std::size_t n) const;
    /// Labels of the alive set at the horizon.
    std::vector<IndexTuple> alive_tuples() const;

    /// One line per event: "time <t> brancher (k1,k2,..) offspring <I>".
    std::string dump() const;
};

/// Event-driven simulation: the minimum of N Exp(beta) clocks is
/// Exp(N beta) and the brancher is uniform among the alive particles.
/// Throws PopulationCap if the alive count exceeds cap.
ParticleTree simulate_tree(double beta, std::span<const double> p, double horizon,
                           RandomStream& rng, std::size_t cap = 1'000'000);

/// Offspring count with law p from one uniform.
std::uint32_t sample_offspring(std::span<const double> p, double u);

struct PopulationMoments {
    double mean_alive;       ///< E[N_T] = exp(beta (m - 1) T)
    double mean_branchings;  ///< E[M_T] = beta int_0^T E[N_s] ds
};

PopulationMoments population_moments(double beta, std::span<const double> p, double horizon);

}  // namespace branchmc
