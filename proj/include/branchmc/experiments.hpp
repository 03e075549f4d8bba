#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchmc/problem.hpp"
#include "branchmc/reference.hpp"

namespace branchmc::experiments {

/// Uncorrelated GBM dX^i = sigma X^i dB^i, X_0 = 1, i < factors, with payoff
/// (sum_i A^i_T / (factors T) - 1)^+ and F(y) = +-y^2 (a_2 = +-1, p_2 = 1).
/// The payoff bound is the user assertion |psi|_0 = 1.
ProblemSpec asian_instance(std::size_t factors, double horizon, QuadraticSign sign,
                           double beta = 0.1, double sigma = 0.2);

/// Same diffusion (one factor) with the constant payoff psi = 1/2.
ProblemSpec constant_payoff_instance(double horizon, QuadraticSign sign, double beta = 0.1);

struct TableSpec {
    int id;
    std::size_t factors;
    double horizon;
};

/// Tables 1..4: (1 factor, T=2), (1, 5), (4, 2), (4, 5).
TableSpec table_spec(int id);

struct TableRow {
    int n = 0;
    double fair_pde1_pct = 0.0, stdev_pde1_pct = 0.0;
    double fair_pde2_pct = 0.0, stdev_pde2_pct = 0.0;
    double cpu_seconds = 0.0;
    double mean_alive = 0.0;
};

struct TableOptions {
    int n_min = 12;
    int n_max = 22;
    int n_step = 2;
    std::uint64_t seed = 1;
    double dt = 0.0;  ///< 0 selects horizon / 50
    unsigned threads = 0;
    double beta = 0.1;
};

/// One row per N with 2^N samples for each of the two nonlinearities.
/// Rows are seeded by (seed, N) so each N is reproducible on its own.
std::vector<TableRow> run_table(int id, const TableOptions& options);

inline constexpr const char* kTableHeader =
    "N,fair_pde1_pct,stdev_pde1_pct,fair_pde2_pct,stdev_pde2_pct,cpu_seconds";
std::string table_csv(const std::vector<TableRow>& rows);

/// The two-variable (x, a) PDE behind the one-factor instance.
FdProblem asian_fd_problem(double horizon, QuadraticSign sign, double beta = 0.1,
                           double sigma = 0.2);
/// x_max = x0 e^{4 sigma sqrt T}, a_max = 3T, stable step count.
FdGrid asian_fd_grid(const FdProblem& pde, std::size_t nx, std::size_t na);

}  // namespace branchmc::experiments
