#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace branchmc {

/// Sign of the quadratic nonlinearity F(y) = +-y^2.
enum class QuadraticSign { Plus, Minus };

/// Value at t=0 of v' = -beta(+-v^2 - v), v(T) = 1/2:
/// 1/(1+e^{beta T}) for +y^2, 1/(-1+3e^{beta T}) for -y^2.
double constant_payoff_solution(double beta, double horizon, QuadraticSign sign);

/// PDE  v_t + x v_a + 1/2 sigma^2 x^2 v_xx + beta(+-v^2 - v) = 0,  v(T) = payoff(x, a).
struct FdProblem {
    double sigma = 0.2;
    double beta = 0.1;
    QuadraticSign sign = QuadraticSign::Plus;
    double horizon = 2.0;
    double x0 = 1.0;
    std::function<double(double x, double a)> payoff;
    /// Source evaluated at clamp(v, -C, C). The unbounded payoff otherwise
    /// makes the +v^2 problem blow up in the far corner of the domain.
    double truncation = 1.0;
};

enum class FdScheme {
    /// Explicit Euler in time, first-order upwind in a.
    EulerUpwind1,
    /// SSP Runge-Kutta 3 in time, third-order upwind-biased in a.
    Rk3Upwind3,
};

/// Uniform grid on [0, x_max] x [0, a_max]. nx = 1 collapses the x axis to
/// the single node x0; na = 1 drops the a axis (payoff evaluated at a = 0).
struct FdGrid {
    double x_max = 0.0;
    std::size_t nx = 1;
    double a_max = 0.0;
    std::size_t na = 1;
    std::size_t time_steps = 1;
    FdScheme scheme = FdScheme::Rk3Upwind3;
};

struct FdResult {
    double value = 0.0;  ///< v(0, x0, 0)
    FdGrid grid;
    double dt = 0.0;
    /// dt * max(sigma^2 x^2 / dx^2 + x / da); <= 1 for the explicit scheme.
    double stability = 0.0;
};

/// Stability limit on dt * (sigma^2 x_max^2 / dx^2 + x_max / da).
double stability_limit(FdScheme scheme);

/// Smallest time step count satisfying the explicit stability bound.
std::size_t stable_time_steps(const FdProblem& pde, const FdGrid& grid, double safety = 0.95);

/// x_max = x0 exp(4 sigma sqrt(T)).
double default_x_max(const FdProblem& pde);

/// Backward-in-time explicit solve: centered second difference in x, upwind
/// difference in a (order per grid.scheme), pointwise source. Zero second
/// derivative at x_max; quadratic extrapolation below a = 0 (outflow) and
/// linear extrapolation beyond a_max.
/// Throws UnstableGrid unless dt (sigma^2 x_max^2 / dx^2 + x_max / da) stays
/// within the scheme's stability limit (1 for Euler, 1.25 for RK3).
FdResult fd_solve(const FdProblem& pde, const FdGrid& grid);

}  // namespace branchmc
