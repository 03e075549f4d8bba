#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace branchmc {

/// Time grid plus one d-vector per node. Between nodes the path is the
/// piecewise-linear interpolant; outside the grid it is held constant at
/// the nearest endpoint (stopped-path convention).
class DiscretePath {
public:
    explicit DiscretePath(std::size_t dim = 1);
    /// Validates strictly increasing grid, matching lengths, finite values.
    DiscretePath(std::vector<double> grid, const std::vector<std::vector<double>>& values);
    /// Single-node path at (t, x).
    static DiscretePath constant(double t, std::span<const double> x);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return grid_.size(); }
    bool empty() const noexcept { return grid_.empty(); }

    std::span<const double> grid() const noexcept { return grid_; }
    double time(std::size_t i) const noexcept { return grid_[i]; }
    double front_time() const noexcept { return grid_.front(); }
    double back_time() const noexcept { return grid_.back(); }

    std::span<const double> node(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<const double> back() const noexcept { return node(size() - 1); }

    /// Interpolated value at t; grid hits return the stored node exactly.
    void evaluate(double t, std::span<double> out) const;
    std::vector<double> evaluate(double t) const;
    double coordinate(double t, std::size_t i) const;

    /// Trapezoid integral of coordinate i over [front_time, min(t, back_time)].
    /// Exact for the piecewise-linear interpolant.
    double integral(std::size_t i, double t) const;

    /// Appends a node; t must exceed back_time() and x must be finite.
    void append(double t, std::span<const double> x);
    /// Appends node i of another path.
    void append_node(const DiscretePath& other, std::size_t i);

    /// Restriction to [front_time, t]; t is inserted as an interpolated node.
    DiscretePath prefix(double t) const;
    /// Nodes with time >= t (t inserted as an interpolated first node).
    DiscretePath suffix(double t) const;

    void reserve(std::size_t nodes);

    friend bool operator==(const DiscretePath&, const DiscretePath&) = default;

private:
    /// Index of the last node with time <= t (assumes front_time <= t).
    std::size_t locate(double t) const noexcept;

    std::size_t dim_;
    std::vector<double> grid_;
    std::vector<double> values_;
};

}  // namespace branchmc
