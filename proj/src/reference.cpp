#include "branchmc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "branchmc/errors.hpp"

namespace branchmc {

double constant_payoff_solution(double beta, double horizon, QuadraticSign sign) {
    const double g = std::exp(beta * horizon);
    return sign == QuadraticSign::Plus ? 1.0 / (1.0 + g) : 1.0 / (-1.0 + 3.0 * g);
}

double default_x_max(const FdProblem& pde) {
    return pde.x0 * std::exp(4.0 * pde.sigma * std::sqrt(pde.horizon));
}

double stability_limit(FdScheme scheme) {
    // RK3's real-axis limit is 2.51; 1.25 also keeps the third-order
    // advection inside its imaginary-axis interval.
    return scheme == FdScheme::EulerUpwind1 ? 1.0 : 1.25;
}

namespace {

double stability_number(const FdProblem& pde, const FdGrid& g, double dt) {
    if (g.nx <= 1) return dt * pde.beta;
    const double dx = g.x_max / static_cast<double>(g.nx - 1);
    double rate = pde.sigma * pde.sigma * g.x_max * g.x_max / (dx * dx);
    if (g.na > 1) rate += g.x_max / (g.a_max / static_cast<double>(g.na - 1));
    return dt * rate;
}

class Operator {
public:
    Operator(const FdProblem& pde, const FdGrid& g) : pde_(pde), g_(g) {
        const std::size_t nx = g.nx, na = g.na;
        dx_ = nx > 1 ? g.x_max / static_cast<double>(nx - 1) : 0.0;
        da_ = na > 1 ? g.a_max / static_cast<double>(na - 1) : 0.0;
        sgn_ = pde.sign == QuadraticSign::Plus ? 1.0 : -1.0;
        cap_ = pde.truncation;
        diff_.resize(nx);
        adv_.resize(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = x_at(i);
            diff_[i] = nx > 1 ? 0.5 * pde.sigma * pde.sigma * x * x / (dx_ * dx_) : 0.0;
            adv_[i] = na > 1 ? x / da_ : 0.0;
        }
    }

    double x_at(std::size_t i) const {
        return g_.nx > 1 ? dx_ * static_cast<double>(i) : pde_.x0;
    }
    double a_at(std::size_t j) const { return g_.na > 1 ? da_ * static_cast<double>(j) : 0.0; }
    double dx() const { return dx_; }

    // out = L(v): time derivative of the backward problem in tau = T - t.
    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const std::size_t nx = g_.nx, na = g_.na;
        const bool third = g_.scheme == FdScheme::Rk3Upwind3;
        for (std::size_t i = 0; i < nx; ++i) {
            const double* row = &v[i * na];
            const bool interior = nx > 1 && i > 0 && i + 1 < nx;
            const double* up = interior ? &v[(i + 1) * na] : nullptr;
            const double* down = interior ? &v[(i - 1) * na] : nullptr;
            double* o = &out[i * na];
            for (std::size_t j = 0; j < na; ++j) {
                const double u = row[j];
                const double uc = std::clamp(u, -cap_, cap_);
                double r = pde_.beta * (sgn_ * uc * uc - uc);
                if (interior) r += diff_[i] * (up[j] - 2.0 * u + down[j]);
                if (na > 1 && adv_[i] != 0.0) r += adv_[i] * slope(row, j, third);
                o[j] = r;
            }
        }
    }

private:
    // da * dv/da, biased toward larger a (information travels from a + x dt).
    double slope(const double* row, std::size_t j, bool third) const {
        const std::size_t na = g_.na;
        auto at = [&](std::ptrdiff_t k) {
            if (k < 0) return 3.0 * row[0] - 3.0 * row[1] + row[2];
            const auto n = static_cast<std::ptrdiff_t>(na);
            if (k >= n) return row[na - 1] + static_cast<double>(k - n + 1) * (row[na - 1] - row[na - 2]);
            return row[k];
        };
        const auto jj = static_cast<std::ptrdiff_t>(j);
        if (!third) return at(jj + 1) - at(jj);
        return (-2.0 * at(jj - 1) - 3.0 * at(jj) + 6.0 * at(jj + 1) - at(jj + 2)) / 6.0;
    }

    const FdProblem& pde_;
    const FdGrid& g_;
    double dx_ = 0.0, da_ = 0.0, sgn_ = 1.0, cap_ = 1.0;
    std::vector<double> diff_, adv_;
};

}  // namespace

std::size_t stable_time_steps(const FdProblem& pde, const FdGrid& grid, double safety) {
    const double unit = stability_number(pde, grid, 1.0);
    if (!(unit > 0.0)) return 1;
    return static_cast<std::size_t>(
        std::ceil(pde.horizon * unit / (safety * stability_limit(grid.scheme))));
}

FdResult fd_solve(const FdProblem& pde, const FdGrid& grid) {
    if (grid.nx == 0 || grid.na == 0 || grid.time_steps == 0)
        throw UnstableGrid("grid needs at least one node and one step");
    if (grid.nx > 1 && !(grid.x_max > pde.x0)) throw UnstableGrid("x_max must exceed x0");
    if (grid.na > 1 && !(grid.a_max > 0.0)) throw UnstableGrid("a_max must be positive");
    if (grid.na == 2 && grid.scheme == FdScheme::Rk3Upwind3)
        throw UnstableGrid("third-order a stencil needs at least 3 nodes");

    const double dt = pde.horizon / static_cast<double>(grid.time_steps);
    FdResult result;
    result.grid = grid;
    result.dt = dt;
    result.stability = stability_number(pde, grid, dt);
    if (grid.nx > 1 && result.stability > stability_limit(grid.scheme))
        throw UnstableGrid("explicit scheme unstable: stability number " +
                           std::to_string(result.stability));

    const Operator op(pde, grid);
    const std::size_t nx = grid.nx, na = grid.na;
    std::vector<double> v(nx * na), k(nx * na), stage(nx * na);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < na; ++j) v[i * na + j] = pde.payoff(op.x_at(i), op.a_at(j));

    for (std::size_t step = 0; step < grid.time_steps; ++step) {
        if (grid.scheme == FdScheme::EulerUpwind1) {
            op.apply(v, k);
            for (std::size_t n = 0; n < v.size(); ++n) v[n] += dt * k[n];
            continue;
        }
        // Shu-Osher SSP-RK3.
        op.apply(v, k);
        for (std::size_t n = 0; n < v.size(); ++n) stage[n] = v[n] + dt * k[n];
        op.apply(stage, k);
        for (std::size_t n = 0; n < v.size(); ++n)
            stage[n] = 0.75 * v[n] + 0.25 * (stage[n] + dt * k[n]);
        op.apply(stage, k);
        for (std::size_t n = 0; n < v.size(); ++n)
            v[n] = v[n] / 3.0 + 2.0 / 3.0 * (stage[n] + dt * k[n]);
    }

    if (nx == 1) {
        result.value = v[0];
        return result;
    }
    // Linear interpolation in x at a = 0.
    const double pos = pde.x0 / op.dx();
    const auto i0 = std::min(static_cast<std::size_t>(pos), nx - 2);
    const double w = pos - static_cast<double>(i0);
    result.value = (1.0 - w) * v[i0 * na] + w * v[(i0 + 1) * na];
    return result;
}

}  // namespace branchmc
