#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "branchmc/catalog.hpp"
#include "branchmc/problem.hpp"

namespace testing {

using namespace branchmc;

inline std::vector<Coefficient> constant_coeffs(const std::vector<double>& a) {
    std::vector<Coefficient> out;
    for (double v : a) out.push_back({catalog::constant(v), std::fabs(v)});
    return out;
}

/// One-factor driftless GBM with constant coefficients a and constant payoff.
inline ProblemData constant_data(const std::vector<double>& a, double payoff, double beta,
                                 double horizon, std::vector<double> p = {}) {
    ProblemData d;
    d.dim = 1;
    d.horizon = horizon;
    d.beta = beta;
    d.coeffs = constant_coeffs(a);
    d.offspring = std::move(p);
    if (d.offspring.empty()) {
        std::vector<double> bounds;
        for (double v : a) bounds.push_back(std::fabs(v));
        d.offspring = default_offspring(bounds);
    }
    d.drift = catalog::zero_drift();
    d.vol = catalog::geometric_vol(0.2);
    d.payoff = catalog::constant_payoff(payoff);
    d.payoff_bound = std::fabs(payoff);
    d.x0 = {1.0};
    return d;
}

inline ProblemSpec constant_spec(const std::vector<double>& a, double payoff, double beta,
                                 double horizon, std::vector<double> p = {}) {
    return ProblemSpec(constant_data(a, payoff, beta, horizon, std::move(p)));
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace testing
