#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "branchmc/branching.hpp"
#include "branchmc/errors.hpp"
#include "branchmc/rng.hpp"
#include "helpers.hpp"

using namespace branchmc;

namespace {

std::vector<ParticleTree> forest(double beta, const std::vector<double>& p, double horizon,
                                 std::size_t n, std::uint64_t seed) {
    std::vector<ParticleTree> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream r({seed, i, kTreeStream});
        out.push_back(simulate_tree(beta, p, horizon, r));
    }
    return out;
}

// Kolmogorov distribution tail at the 1% level.
constexpr double kKs99 = 1.628;

}  // namespace

TEST_SUITE("branching_engine") {

TEST_CASE("index_code examples") {
    const IndexTuple a{1}, b{1, 2}, c{1, 1, 1};
    CHECK(index_code(a, 2) == 3);
    CHECK(index_code(b, 2) == 21);
    CHECK(index_code(c, 2) == 39);
    IndexTuple deep(80, 2);
    CHECK(index_code(deep, 2) > boost::multiprecision::cpp_int(1) << 120);
}

TEST_CASE("index_code is injective on bounded tuples") {
    std::map<boost::multiprecision::cpp_int, IndexTuple> seen;
    std::vector<IndexTuple> level{{}};
    for (int len = 1; len <= 6; ++len) {
        std::vector<IndexTuple> next;
        for (const auto& t : level)
            for (std::uint32_t k = 1; k <= 3; ++k) {
                IndexTuple u = t;
                u.push_back(k);
                const auto [it, fresh] = seen.emplace(index_code(u, 3), u);
                CHECK(fresh);
                next.push_back(u);
            }
        level = std::move(next);
    }
}

TEST_CASE("p = (1): extinction probability") {
    const auto trees = forest(0.1, {1.0}, 2.0, 100000, 1);
    std::vector<double> dead;
    for (const auto& t : trees) {
        dead.push_back(t.extinct() ? 1.0 : 0.0);
        CHECK(t.branchings() <= 1);
    }
    const double p = 1.0 - std::exp(-0.2);
    CHECK(p == doctest::Approx(0.181).epsilon(0.01));
    CHECK(std::fabs(testing::mean(dead) - p) <= 4 * testing::std_error(dead));
}

TEST_CASE("population_moments examples") {
    const std::vector<double> binary{0, 0, 1}, renewal{0, 1}, death{1};
    CHECK(population_moments(0.1, binary, 5.0).mean_alive == doctest::Approx(std::exp(0.5)));
    CHECK(population_moments(0.1, binary, 5.0).mean_alive == doctest::Approx(1.65).epsilon(0.005));
    CHECK(population_moments(0.1, binary, 2.0).mean_alive == doctest::Approx(1.22).epsilon(0.005));
    CHECK(population_moments(0.7, renewal, 3.0).mean_alive == 1.0);
    CHECK(population_moments(0.7, renewal, 3.0).mean_branchings == doctest::Approx(2.1));
    CHECK(population_moments(0.1, death, 2.0).mean_alive == doctest::Approx(0.8187).epsilon(1e-4));
    CHECK(population_moments(0.1, binary, 2.0).mean_branchings ==
          doctest::Approx(std::exp(0.2) - 1.0).epsilon(1e-10));
}

TEST_CASE("Galton-Watson moments at 4 standard errors") {
    const std::vector<std::vector<double>> laws{{1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0}, {0.3, 0.2, 0.5}};
    std::uint64_t seed = 10;
    for (const auto& p : laws) {
        const double beta = 0.1, T = 2.0;
        const auto trees = forest(beta, p, T, 100000, seed++);
        std::vector<double> alive, branchings;
        for (const auto& t : trees) {
            alive.push_back(static_cast<double>(t.alive_count()));
            branchings.push_back(static_cast<double>(t.branchings()));
        }
        const PopulationMoments m = population_moments(beta, p, T);
        INFO("law size " << p.size());
        if (testing::std_error(alive) > 0.0)
            CHECK(std::fabs(testing::mean(alive) - m.mean_alive) <= 4 * testing::std_error(alive));
        else
            CHECK(testing::mean(alive) == m.mean_alive);
        CHECK(std::fabs(testing::mean(branchings) - m.mean_branchings) <=
              4 * testing::std_error(branchings));
    }
}

TEST_CASE("renewal law keeps one particle") {
    for (const auto& t : forest(0.7, {0, 1}, 3.0, 1000, 3)) {
        CHECK(t.alive_count() == 1);
        CHECK(t.particles.size() == t.branchings() + 1);
    }
}

TEST_CASE("first branch time is Exp(beta)") {
    const double beta = 0.4, T = 1e9;
    std::vector<double> times;
    for (std::size_t i = 0; i < 100000; ++i) {
        RandomStream r({21, i, kTreeStream});
        const ParticleTree t = simulate_tree(beta, std::vector<double>{1.0}, T, r);
        REQUIRE(t.branchings() == 1);
        times.push_back(t.events[0].time);
    }
    std::sort(times.begin(), times.end());
    const double n = static_cast<double>(times.size());
    double d = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double f = 1.0 - std::exp(-beta * times[i]);
        d = std::max({d, std::fabs(f - i / n), std::fabs(f - (i + 1) / n)});
    }
    CHECK(std::sqrt(n) * d < kKs99);
}

TEST_CASE("offspring frequencies match p") {
    const std::vector<double> p{0.3, 0.2, 0.5};
    std::vector<double> counts(3, 0.0);
    double events = 0.0;
    for (const auto& t : forest(0.5, p, 3.0, 40000, 5))
        for (const auto& e : t.events) {
            counts[e.offspring] += 1.0;
            events += 1.0;
        }
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double se = std::sqrt(p[k] * (1 - p[k]) / events);
        CHECK(std::fabs(counts[k] / events - p[k]) <= 4 * se);
    }
    RandomStream r({9, 0, 0});
    for (int i = 0; i < 1000; ++i) CHECK(sample_offspring(p, r.uniform()) <= 2);
    CHECK(sample_offspring(p, 0.29) == 0);
    CHECK(sample_offspring(p, 0.31) == 1);
    CHECK(sample_offspring(p, 0.99) == 2);
}

TEST_CASE("event bookkeeping and index relabeling") {
    const std::vector<double> p{0.25, 0.15, 0.35, 0.25};
    for (const auto& tree : forest(0.6, p, 4.0, 3000, 8)) {
        // N recurrence.
        std::size_t n = 1;
        double last = 0.0;
        for (const auto& e : tree.events) {
            CHECK(e.time > last);
            CHECK(e.time <= tree.horizon);
            last = e.time;
            n = n + e.offspring - 1;
        }
        CHECK(n == tree.alive_count());
        CHECK(std::is_sorted(tree.alive.begin(), tree.alive.end()));

        // Replay brancher tuples: brancher k -> (k,1..I); everyone else k -> (k,1).
        std::vector<IndexTuple> alive{{1}};
        for (std::size_t e = 1; e <= tree.branchings(); ++e) {
            const IndexTuple k = tree.brancher_tuple(e);
            const auto it = std::find(alive.begin(), alive.end(), k);
            REQUIRE(it != alive.end());
            alive.erase(it);
            for (auto& other : alive) other.push_back(1);
            for (std::uint32_t j = 1; j <= tree.events[e - 1].offspring; ++j) {
                IndexTuple child = k;
                child.push_back(j);
                alive.push_back(child);
            }
        }
        auto expected = tree.alive_tuples();
        std::sort(alive.begin(), alive.end());
        std::sort(expected.begin(), expected.end());
        CHECK(alive == expected);
        for (const auto& t : expected) {
            CHECK(t.size() == 1 + tree.branchings());
            for (auto k : t) {
                CHECK(k >= 1);
                CHECK(k <= 3);
            }
        }
    }
}

TEST_CASE("extinction is absorbing") {
    for (const auto& t : forest(2.0, {0.7, 0.0, 0.3}, 10.0, 2000, 12)) {
        if (!t.extinct()) continue;
        std::size_t n = 1;
        for (const auto& e : t.events) {
            CHECK(n > 0);
            n = n + e.offspring - 1;
        }
        CHECK(n == 0);
    }
}

TEST_CASE("memorylessness: subtree after s with N_s = 1 is a fresh tree") {
    const double beta = 0.3, T = 4.0, s = 1.5;
    const std::vector<double> p{0.2, 0.3, 0.5};
    std::vector<double> conditioned;
    for (const auto& tree : forest(beta, p, T, 150000, 30)) {
        std::size_t n = 1;
        for (const auto& e : tree.events) {
            if (e.time > s) break;
            n = n + e.offspring - 1;
        }
        if (n == 1) conditioned.push_back(static_cast<double>(tree.alive_count()));
    }
    std::vector<double> fresh;
    for (const auto& tree : forest(beta, p, T - s, 100000, 31))
        fresh.push_back(static_cast<double>(tree.alive_count()));
    const double se = std::hypot(testing::std_error(conditioned), testing::std_error(fresh));
    CHECK(std::fabs(testing::mean(conditioned) - testing::mean(fresh)) <= 4 * se);
    CHECK(testing::mean(fresh) ==
          doctest::Approx(population_moments(beta, p, T - s).mean_alive).epsilon(0.02));
}

TEST_CASE("population cap") {
    RandomStream r({1, 0, kTreeStream});
    CHECK_THROWS_AS(simulate_tree(3.0, std::vector<double>{0, 0, 1}, 5.0, r, 50), PopulationCap);
}

TEST_CASE("tree dump lists one line per event") {
    RandomStream r({4, 2, kTreeStream});
    const ParticleTree t = simulate_tree(1.0, std::vector<double>{0.1, 0.2, 0.7}, 2.0, r);
    const std::string d = t.dump();
    CHECK(static_cast<std::size_t>(std::count(d.begin(), d.end(), '\n')) == t.branchings());
    if (t.branchings() > 0) CHECK(d.rfind("time ", 0) == 0);
}

TEST_CASE("trees are reproducible from their stream") {
    RandomStream a({5, 9, kTreeStream}), b({5, 9, kTreeStream});
    const std::vector<double> p{0.2, 0.3, 0.5};
    const ParticleTree x = simulate_tree(0.8, p, 3.0, a);
    const ParticleTree y = simulate_tree(0.8, p, 3.0, b);
    CHECK(x.dump() == y.dump());
    CHECK(x.alive == y.alive);
}

}
