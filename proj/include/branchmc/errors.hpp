#pragma once

#include <stdexcept>
#include <string>

namespace branchmc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem data violates a structural invariant (probabilities, bounds, dims).
class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// |psi|_0 = 0 makes the comparison function undefined; supply an epsilon shift.
class ZeroPsiBound : public Error {
public:
    ZeroPsiBound()
        : Error("payoff bound is zero; pass an explicit epsilon shift") {}
};

/// Alive population exceeded the configured cap while simulating a tree.
class PopulationCap : public Error {
public:
    explicit PopulationCap(std::size_t cap)
        : Error("alive population exceeded cap of " + std::to_string(cap)),
          cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// A simulated state coordinate became NaN or infinite.
class NonFiniteState : public Error {
public:
    explicit NonFiniteState(double t)
        : Error("non-finite state at t=" + std::to_string(t)), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class UnstableGrid : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problem data fails the comparison-function admissibility check.
class FeasibilityRejected : public Error {
public:
    using Error::Error;
};

/// Too many per-sample failures in a Monte Carlo run.
class EstimationAborted : public Error {
public:
    using Error::Error;
};

}  // namespace branchmc
