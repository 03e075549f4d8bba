#include "branchmc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "branchmc/errors.hpp"

namespace branchmc {

namespace {

// Cholesky of (m - floor*I); fails iff m - floor*I is not positive semidefinite
// up to a small relative tolerance.
bool dominates_floor(std::vector<double> m, std::size_t d, double floor) {
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::fabs(m[i * d + i]));
    const double tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] -= floor;
    for (std::size_t j = 0; j < d; ++j) {
        double diag = m[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= m[j * d + k] * m[j * d + k];
        if (diag < -tol) return false;
        const double root = std::sqrt(std::max(diag, 0.0));
        m[j * d + j] = root;
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = m[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= m[i * d + k] * m[j * d + k];
            m[i * d + j] = root > tol ? v / root : 0.0;
        }
    }
    return true;
}

void check_nondegenerate(const ProblemData& d) {
    const std::size_t n = d.dim;
    std::vector<double> sigma(n * n), cov(n * n);
    // Spot checks: the initial point and a few deterministic perturbations.
    for (int probe = 0; probe <= static_cast<int>(2 * n); ++probe) {
        std::vector<double> x = d.x0;
        if (probe > 0) {
            const std::size_t axis = static_cast<std::size_t>(probe - 1) / 2;
            const double sign = (probe % 2 == 1) ? 1.0 : -1.0;
            x[axis] += sign * 0.1 * std::max(1.0, std::fabs(x[axis]));
        }
        const DiscretePath path = DiscretePath::constant(0.0, x);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        d.vol.fn(0.0, path, sigma);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += sigma[i * n + k] * sigma[j * n + k];
                cov[i * n + j] = s;
            }
        if (!dominates_floor(cov, n, d.vol_floor))
            throw InvalidSpec("volatility violates declared nondegeneracy floor");
    }
}

}  // namespace

std::vector<double> default_offspring(std::span<const double> bounds) {
    const double total = std::accumulate(bounds.begin(), bounds.end(), 0.0);
    std::vector<double> p(bounds.size(), 0.0);
    if (!(total > 0.0)) {
        if (!p.empty()) p[0] = 1.0;
        return p;
    }
    for (std::size_t k = 0; k < bounds.size(); ++k) p[k] = bounds[k] / total;
    return p;
}

ProblemSpec::ProblemSpec(ProblemData data) : data_(std::move(data)) {
    auto& d = data_;
    if (d.dim == 0) throw InvalidSpec("dim must be positive");
    if (!(d.horizon > 0.0) || !std::isfinite(d.horizon)) throw InvalidSpec("horizon must be > 0");
    if (!(d.beta >= 0.0) || !std::isfinite(d.beta)) throw InvalidSpec("beta must be >= 0");
    if (d.coeffs.empty()) throw InvalidSpec("at least one coefficient a_0 is required");
    if (d.x0.size() != d.dim) throw InvalidSpec("x0 has wrong dimension");
    if (!d.drift.fn || !d.vol.fn || !d.payoff.fn) throw InvalidSpec("missing functional");
    for (const auto& c : d.coeffs) {
        if (!c.fn.fn) throw InvalidSpec("missing coefficient functional");
        if (!(c.bound >= 0.0) || !std::isfinite(c.bound))
            throw InvalidSpec("coefficient bounds must be finite and >= 0");
    }
    if (!(d.payoff_bound > 0.0) || !std::isfinite(d.payoff_bound))
        throw InvalidSpec("payoff bound must be > 0");
    if (!(d.vol_floor >= 0.0)) throw InvalidSpec("vol floor must be >= 0");

    if (d.offspring.empty()) d.offspring = default_offspring(coeff_bounds());
    if (d.offspring.size() > d.coeffs.size()) throw InvalidSpec("offspring law longer than coeffs");
    d.offspring.resize(d.coeffs.size(), 0.0);
    double total = 0.0;
    for (double pk : d.offspring) {
        if (!(pk >= 0.0)) throw InvalidSpec("offspring probabilities must be >= 0");
        total += pk;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw InvalidSpec("offspring probabilities must sum to 1");
    for (std::size_t k = 0; k < d.coeffs.size(); ++k)
        if (d.coeffs[k].bound != 0.0 && !(d.offspring[k] > 0.0))
            throw InvalidSpec("p_k must be positive wherever |a_k|_0 != 0");

    if (d.vol_floor > 0.0) check_nondegenerate(d);
}

std::vector<double> ProblemSpec::coeff_bounds() const {
    std::vector<double> b;
    b.reserve(data_.coeffs.size());
    for (const auto& c : data_.coeffs) b.push_back(c.bound);
    return b;
}

ProblemSpec ProblemSpec::with_offspring(std::vector<double> p) const {
    ProblemData d = data_;
    d.offspring = std::move(p);
    return ProblemSpec(std::move(d));
}

ProblemSpec ProblemSpec::with_beta(double beta) const {
    ProblemData d = data_;
    d.beta = beta;
    return ProblemSpec(std::move(d));
}

ProblemSpec ProblemSpec::with_horizon(double horizon) const {
    ProblemData d = data_;
    d.horizon = horizon;
    return ProblemSpec(std::move(d));
}

double generator_value(const ProblemSpec& spec, double t, const DiscretePath& path, double y) {
    double acc = 0.0;
    for (std::size_t k = spec.coeffs().size(); k-- > 0;) acc = acc * y + spec.coeff(k, t, path);
    return spec.beta() * (acc - y);
}

double sampled_payoff_sup(const ProblemSpec& spec, std::span<const DiscretePath> paths) {
    double sup = 0.0;
    for (const auto& p : paths) sup = std::max(sup, std::fabs(spec.payoff(p)));
    return sup;
}

}  // namespace branchmc
