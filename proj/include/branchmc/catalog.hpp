#pragma once

// Built-in path functionals. Every entry is pure and carries its catalog
// expression, e.g. "call_on_average(strike=1)".

#include <cstddef>

#include "branchmc/problem.hpp"

namespace branchmc::catalog {

// Scalar functionals a(t, path).
Named<PathFunctional> constant(double value);
Named<PathFunctional> coordinate(std::size_t index);
/// A_t = integral_0^t X^index_s ds on the piecewise-linear path.
Named<PathFunctional> running_integral(std::size_t index);
/// (1/d) sum_i X^i_t.
Named<PathFunctional> basket_average();

// Drift / volatility.
Named<VectorFunctional> zero_drift();
Named<VectorFunctional> constant_drift(double mu);
/// mu_i = rate * X^i_t.
Named<VectorFunctional> geometric_drift(double rate);
/// sigma = diag(sigma * X^i_t); uncorrelated geometric Brownian motion.
Named<VectorFunctional> geometric_vol(double sigma);
/// sigma = sigma * I.
Named<VectorFunctional> constant_vol(double sigma);

// Payoffs psi(path).
Named<PayoffFunctional> constant_payoff(double value);
/// (z - strike)^+ with z = X^index_T.
Named<PayoffFunctional> call(std::size_t index, double strike);
/// (sum_i A^i_T / (d * (T - t0)) - strike)^+ with A the running integral
/// from the path start t0 to its end T.
Named<PayoffFunctional> call_on_average(double strike);
/// Basket terminal value (1/d) sum_i X^i_T, uncapped.
Named<PayoffFunctional> basket_terminal();

/// Scalar positive part.
inline double positive_part(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace branchmc::catalog
