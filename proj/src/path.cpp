#include "branchmc/path.hpp"

#include <algorithm>
#include <cmath>

#include "branchmc/errors.hpp"

namespace branchmc {

namespace {

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

DiscretePath::DiscretePath(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidSpec("path dimension must be positive");
}

DiscretePath::DiscretePath(std::vector<double> grid,
                           const std::vector<std::vector<double>>& values)
    : dim_(values.empty() ? 1 : values.front().size()) {
    if (grid.size() != values.size()) throw InvalidSpec("grid and values lengths differ");
    if (dim_ == 0) throw InvalidSpec("path dimension must be positive");
    reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (values[i].size() != dim_) throw InvalidSpec("ragged path values");
        append(grid[i], values[i]);
    }
}

DiscretePath DiscretePath::constant(double t, std::span<const double> x) {
    DiscretePath p(x.size());
    p.append(t, x);
    return p;
}

void DiscretePath::reserve(std::size_t nodes) {
    grid_.reserve(nodes);
    values_.reserve(nodes * dim_);
}

void DiscretePath::append(double t, std::span<const double> x) {
    if (x.size() != dim_) throw InvalidSpec("node dimension mismatch");
    if (!std::isfinite(t) || (!grid_.empty() && !(t > grid_.back())))
        throw InvalidSpec("path grid must be strictly increasing");
    if (!all_finite(x)) throw NonFiniteState(t);
    grid_.push_back(t);
    values_.insert(values_.end(), x.begin(), x.end());
}

void DiscretePath::append_node(const DiscretePath& other, std::size_t i) {
    append(other.time(i), other.node(i));
}

std::size_t DiscretePath::locate(double t) const noexcept {
    if (t >= grid_.back()) return grid_.size() - 1;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

void DiscretePath::evaluate(double t, std::span<double> out) const {
    if (t <= grid_.front()) {
        std::copy_n(node(0).begin(), dim_, out.begin());
        return;
    }
    const std::size_t i = locate(t);
    const auto lo = node(i);
    if (t == grid_[i] || i + 1 == grid_.size()) {
        std::copy_n(lo.begin(), dim_, out.begin());
        return;
    }
    const auto hi = node(i + 1);
    const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
    for (std::size_t k = 0; k < dim_; ++k) out[k] = lo[k] + w * (hi[k] - lo[k]);
}

std::vector<double> DiscretePath::evaluate(double t) const {
    std::vector<double> out(dim_);
    evaluate(t, out);
    return out;
}

double DiscretePath::coordinate(double t, std::size_t k) const {
    if (t <= grid_.front()) return values_[k];
    const std::size_t i = locate(t);
    const double lo = values_[i * dim_ + k];
    if (t == grid_[i] || i + 1 == grid_.size()) return lo;
    const double hi = values_[(i + 1) * dim_ + k];
    const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return lo + w * (hi - lo);
}

double DiscretePath::integral(std::size_t k, double t) const {
    double sum = 0.0;
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i + 1 < n && grid_[i] < t; ++i) {
        const double t1 = std::min(grid_[i + 1], t);
        const double x0 = values_[i * dim_ + k];
        const double x1 = t1 == grid_[i + 1] ? values_[(i + 1) * dim_ + k] : coordinate(t1, k);
        sum += 0.5 * (x0 + x1) * (t1 - grid_[i]);
    }
    return sum;
}

DiscretePath DiscretePath::prefix(double t) const {
    DiscretePath out(dim_);
    out.reserve(size() + 1);
    std::size_t i = 0;
    for (; i < size() && grid_[i] <= t; ++i) out.append_node(*this, i);
    if (out.empty()) {
        out.append(t, node(0));
    } else if (out.back_time() < t && i < size()) {
        out.append(t, evaluate(t));
    }
    return out;
}

DiscretePath DiscretePath::suffix(double t) const {
    DiscretePath out(dim_);
    std::size_t i = 0;
    while (i < size() && grid_[i] < t) ++i;
    if (i == size() || grid_[i] > t) out.append(t, evaluate(t));
    for (; i < size(); ++i) out.append_node(*this, i);
    return out;
}

}  // namespace branchmc
