#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "branchmc/path.hpp"

namespace branchmc {

/// Non-anticipative scalar functional a(t, path). Must be pure.
using PathFunctional = std::function<double(double t, const DiscretePath& path)>;
/// Writes d (drift) or d*d row-major (volatility) entries into out.
using VectorFunctional =
    std::function<void(double t, const DiscretePath& path, std::span<double> out)>;
/// Terminal functional psi(path) evaluated on the whole path.
using PayoffFunctional = std::function<double(const DiscretePath& path)>;

/// A functional together with the catalog expression that produced it, so
/// that problem instances can be echoed back into configuration text.
template <class Fn>
struct Named {
    Fn fn;
    std::string expr;
};

/// One power-series coefficient a_k with its declared sup-norm bound |a_k|_0.
struct Coefficient {
    Named<PathFunctional> fn;
    double bound = 0.0;
};

/// Raw problem data before validation.
struct ProblemData {
    std::size_t dim = 1;
    double horizon = 1.0;
    double beta = 0.1;
    std::vector<Coefficient> coeffs;
    /// Empty means "p_k proportional to |a_k|_0".
    std::vector<double> offspring;
    Named<VectorFunctional> drift;
    Named<VectorFunctional> vol;
    /// Declared c0 with sigma sigma^T >= c0 I; 0 declares a degenerate diffusion.
    double vol_floor = 0.0;
    Named<PayoffFunctional> payoff;
    double payoff_bound = 1.0;
    std::vector<double> x0;
};

/// Validated, immutable problem instance.
class ProblemSpec {
public:
    /// Throws InvalidSpec on any violated invariant.
    explicit ProblemSpec(ProblemData data);

    const ProblemData& data() const noexcept { return data_; }
    std::size_t dim() const noexcept { return data_.dim; }
    double horizon() const noexcept { return data_.horizon; }
    double beta() const noexcept { return data_.beta; }
    /// n0: highest coefficient index.
    std::size_t degree() const noexcept { return data_.coeffs.size() - 1; }
    const std::vector<Coefficient>& coeffs() const noexcept { return data_.coeffs; }
    const std::vector<double>& offspring() const noexcept { return data_.offspring; }
    std::vector<double> coeff_bounds() const;
    double payoff_bound() const noexcept { return data_.payoff_bound; }
    const std::vector<double>& x0() const noexcept { return data_.x0; }

    double coeff(std::size_t k, double t, const DiscretePath& path) const {
        return data_.coeffs[k].fn.fn(t, path);
    }
    void drift(double t, const DiscretePath& path, std::span<double> out) const {
        data_.drift.fn(t, path, out);
    }
    void vol(double t, const DiscretePath& path, std::span<double> out) const {
        data_.vol.fn(t, path, out);
    }
    double payoff(const DiscretePath& path) const { return data_.payoff.fn(path); }

    /// Same instance with a different offspring law (validated again).
    ProblemSpec with_offspring(std::vector<double> p) const;
    ProblemSpec with_beta(double beta) const;
    ProblemSpec with_horizon(double horizon) const;

private:
    ProblemData data_;
};

/// p_k proportional to |a_k|_0; all mass on k=0 if every bound vanishes.
std::vector<double> default_offspring(std::span<const double> coeff_bounds);

/// beta * (sum_k a_k(t, path) y^k - y), Horner in y.
double generator_value(const ProblemSpec& spec, double t, const DiscretePath& path, double y);

/// Largest |psi(path)| seen on the given paths. Diagnostic only; never used
/// for certification.
double sampled_payoff_sup(const ProblemSpec& spec, std::span<const DiscretePath> paths);

}  // namespace branchmc
