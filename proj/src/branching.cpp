#include "branchmc/branching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "branchmc/errors.hpp"
#include "branchmc/feasibility.hpp"

namespace branchmc {

boost::multiprecision::cpp_int index_code(std::span<const std::uint32_t> tuple, std::uint32_t n0) {
    using boost::multiprecision::cpp_int;
    cpp_int code = 0;
    cpp_int base = n0 + 1;
    cpp_int power = base;
    for (std::uint32_t k : tuple) {
        code += power * k;
        power *= base;
    }
    return code;
}

IndexTuple ParticleTree::tuple(std::uint32_t id, std::size_t event) const {
    const ParticleRecord& rec = particles.at(id);
    IndexTuple label;
    if (rec.parent < 0) {
        label.push_back(1);
    } else {
        label = tuple(static_cast<std::uint32_t>(rec.parent), rec.birth_event - 1);
        label.push_back(rec.rank);
    }
    // Re-indexed by (k, 1) at every later event this particle survives.
    label.resize(label.size() + (event - rec.birth_event), 1);
    return label;
}

IndexTuple ParticleTree::brancher_tuple(std::size_t n) const {
    return tuple(events.at(n - 1).brancher, n - 1);
}

std::vector<IndexTuple> ParticleTree::alive_tuples() const {
    std::vector<IndexTuple> out;
    out.reserve(alive.size());
    for (std::uint32_t id : alive) out.push_back(tuple(id, events.size()));
    return out;
}

std::string ParticleTree::dump() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t n = 1; n <= events.size(); ++n) {
        os << "time " << events[n - 1].time << " brancher (";
        const auto label = brancher_tuple(n);
        for (std::size_t i = 0; i < label.size(); ++i) os << (i ? "," : "") << label[i];
        os << ") offspring " << events[n - 1].offspring << '\n';
    }
    return os.str();
}

std::uint32_t sample_offspring(std::span<const double> p, double u) {
    double acc = 0.0;
    std::uint32_t last = 0;
    for (std::uint32_t k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0) continue;
        acc += p[k];
        last = k;
        if (u < acc) return k;
    }
    return last;
}

ParticleTree simulate_tree(double beta, std::span<const double> p, double horizon,
                           RandomStream& rng, std::size_t cap) {
    ParticleTree tree;
    tree.horizon = horizon;
    tree.n0 = static_cast<std::uint32_t>(p.empty() ? 0 : p.size() - 1);
    tree.particles.push_back(ParticleRecord{0.0, horizon, -1, 1, 0, 0, true});

    std::vector<std::uint32_t> alive{0};
    double t = 0.0;
    while (!alive.empty() && beta > 0.0) {
        t += rng.exponential(beta * static_cast<double>(alive.size()));
        if (t > horizon) break;
        const auto pick = std::min<std::size_t>(
            static_cast<std::size_t>(rng.uniform() * static_cast<double>(alive.size())),
            alive.size() - 1);
        const std::uint32_t brancher = alive[pick];
        const std::uint32_t count = sample_offspring(p, rng.uniform());

        tree.events.push_back({t, brancher, count});
        auto& rec = tree.particles[brancher];
        rec.end = t;
        rec.alive = false;
        alive[pick] = alive.back();
        alive.pop_back();

        const auto event = static_cast<std::uint32_t>(tree.events.size());
        for (std::uint32_t j = 1; j <= count; ++j) {
            const auto id = static_cast<std::uint32_t>(tree.particles.size());
            tree.particles.push_back(
                ParticleRecord{t, horizon, static_cast<std::int64_t>(brancher), j, event, id, true});
            alive.push_back(id);
        }
        if (alive.size() > cap) throw PopulationCap(cap);
    }
    std::sort(alive.begin(), alive.end());
    tree.alive = std::move(alive);
    return tree;
}

PopulationMoments population_moments(double beta, std::span<const double> p, double horizon) {
    double mean_offspring = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) mean_offspring += static_cast<double>(k) * p[k];
    const double growth = beta * (mean_offspring - 1.0);
    const double branchings = adaptive_simpson(
        [&](double s) { return beta * std::exp(growth * s); }, 0.0, horizon, 1e-13);
    return {std::exp(growth * horizon), branchings};
}

}  // namespace branchmc
