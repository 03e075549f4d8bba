#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "branchmc/path.hpp"
#include "branchmc/problem.hpp"

namespace branchmc {

/// Polynomial comparison function l(s) = sum_k e_k s^k, stored with the
/// -beta*s term already folded into e_1.
class EllFunction {
public:
    EllFunction() = default;
    explicit EllFunction(std::vector<double> poly_coeffs);

    double operator()(double s) const;
    double derivative(double s) const;
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    /// Highest k with e_k != 0.
    std::size_t degree() const noexcept;

private:
    std::vector<double> coeffs_;
};

/// Scalar data the comparison function is built from.
struct EllInputs {
    std::vector<double> coeff_bounds;  ///< |a_k|_0
    double psi_bound = 1.0;            ///< |psi|_0
    double beta = 0.1;
    double horizon = 1.0;
};

EllInputs ell_inputs(const ProblemSpec& spec);

/// l(s) = beta * (|psi|_0^{-1} l0(s |psi|_0) - s) with l0(s) = sum |a_k|_0 s^k.
/// With epsilon set, |psi|_0 is replaced by epsilon (terminal value shift for
/// psi == 0). Throws ZeroPsiBound if the effective bound is zero.
EllFunction build_ell(const EllInputs& in, std::optional<double> epsilon = std::nullopt);
EllFunction build_ell(const ProblemSpec& spec, std::optional<double> epsilon = std::nullopt);

enum class Regime { L1, L2, L3, Infeasible };
std::string to_string(Regime r);

struct BlowUp {
    double time;  ///< estimated blow-up time of rho
};

/// Adaptive RK4 (step doubling, relative local error <= rel_tol) for
/// rho' = l(rho), rho(0) = 1, on [0, horizon]. Node spacing is also limited
/// so the piecewise-linear interpolant stays within interp_tol of rho.
std::variant<DiscretePath, BlowUp> integrate_rho(const EllFunction& ell, double horizon,
                                                 double blow_up_cap, double rel_tol = 1e-9,
                                                 double interp_tol = 1e-10);

struct EllAnalysis {
    std::vector<double> ell0_coeffs;
    double psi_bound = 0.0;
    double beta = 0.0;
    double horizon = 0.0;
    Regime regime = Regime::Infeasible;
    /// L2: smallest root s_hat > 1 of l.
    std::optional<double> root;
    /// L3: s_bar with integral_1^{s_bar} ds / l(s) = horizon.
    std::optional<double> s_bar;
    /// integral_1^inf ds / l(s) when l > 0 on [1, inf) (may be +inf).
    std::optional<double> blow_up_horizon;
    /// rho on [0, horizon]; empty when infeasible.
    std::optional<DiscretePath> rho;
    /// |psi|_0 * max rho; +inf when infeasible.
    double r0 = 0.0;

    bool feasible() const noexcept { return regime != Regime::Infeasible; }
    double rho_at_horizon() const { return rho ? rho->back()[0] : 0.0; }
};

/// key = value lines: regime, root / s_bar / blow_up_horizon, r0, rho_T.
std::string describe(const EllAnalysis& a);

EllAnalysis classify(const EllInputs& in, std::optional<double> epsilon = std::nullopt);
EllAnalysis classify(const ProblemSpec& spec, std::optional<double> epsilon = std::nullopt);
/// Regime analysis of an arbitrary comparison polynomial on [0, horizon].
EllAnalysis classify_ell(const EllFunction& ell, double horizon);

enum class VarianceVerdict { Finite, Uncertified };
std::string to_string(VarianceVerdict v);

/// l^v(s) = beta (sum_{p_k>0} (|a_k|_0^2 / p_k) |psi|_0^{2k-1} s^k - s).
EllFunction build_variance_ell(const ProblemSpec& spec);
/// Finite iff one of (l1)-(l3) holds for l^v.
VarianceVerdict variance_radius_check(const ProblemSpec& spec);

/// E[prod (|a_I|_0/p_I)^2 prod |psi|_0^2], the second-moment majorant of a
/// sample, via its own ODE. Returns nullopt if that ODE blows up before T.
std::optional<double> second_moment_bound(const ProblemSpec& spec);

/// Smallest root of l in (1, inf), if any.
std::optional<double> smallest_root_above_one(const EllFunction& ell);
/// integral_a^b f, adaptive Simpson to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace branchmc
