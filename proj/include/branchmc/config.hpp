#pragma once

// Line-oriented run configuration:
//
//   # comment
//   problem.horizon = 2
//   problem.coeffs = constant(value=0); constant(value=0); constant(value=1)
//
// Keys are section.name; unknown keys and duplicates are rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "branchmc/problem.hpp"

namespace branchmc {

struct RunConfig {
    // problem
    std::size_t dim = 1;
    double horizon = 1.0;
    double beta = 0.1;
    std::vector<double> x0{1.0};
    std::string drift = "zero()";
    std::string vol = "constant(sigma=1)";
    double vol_floor = 0.0;
    std::vector<std::string> coeffs;
    /// Empty: every coefficient must be constant(...) and its bound is |value|.
    std::vector<double> coeff_bounds;
    /// Empty: p_k proportional to |a_k|_0.
    std::vector<double> offspring;
    std::string payoff = "constant(value=1)";
    double payoff_bound = 1.0;

    // run
    int samples_log2 = 16;
    double dt = 0.0;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::size_t population_cap = 1'000'000;

    // output
    std::string csv;
    int verbosity = 1;

    bool operator==(const RunConfig&) const = default;

    /// Builds and validates the problem; throws ConfigError or InvalidSpec.
    ProblemSpec to_problem() const;
    /// Canonical text; parse_config(to_text()) reproduces *this.
    std::string to_text() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// A parsed catalog expression name(key=value, ...).
struct CatalogCall {
    std::string name;
    std::vector<std::pair<std::string, double>> args;
};
CatalogCall parse_catalog_call(std::string_view expr);

Named<PathFunctional> parse_scalar(std::string_view expr);
Named<VectorFunctional> parse_drift(std::string_view expr);
Named<VectorFunctional> parse_vol(std::string_view expr);
Named<PayoffFunctional> parse_payoff(std::string_view expr);

}  // namespace branchmc
