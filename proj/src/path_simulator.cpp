#include "branchmc/path_simulator.hpp"

#include <cmath>
#include <sstream>

#include "branchmc/errors.hpp"

namespace branchmc {

LineagePath::LineagePath(DiscretePath history) {
    auto seg = std::make_shared<PathSegment>();
    seg->birth = history.front_time();
    seg->path = std::move(history);
    segments_.push_back(std::move(seg));
}

DiscretePath LineagePath::materialize() const {
    DiscretePath out(dim());
    std::size_t total = 0;
    for (const auto& s : segments_) total += s->path.size();
    out.reserve(total);
    for (const auto& s : segments_) {
        const DiscretePath& p = s->path;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!out.empty() && p.time(i) <= out.back_time()) continue;
            out.append_node(p, i);
        }
    }
    return out;
}

LineagePath LineagePath::restricted(double t) const {
    LineagePath out;
    for (const auto& s : segments_) {
        if (s->path.back_time() <= t) {
            out.segments_.push_back(s);
            continue;
        }
        if (s->path.front_time() < t || out.segments_.empty()) {
            auto cut = std::make_shared<PathSegment>(*s);
            cut->path = s->path.prefix(t);
            out.segments_.push_back(std::move(cut));
        }
        break;
    }
    return out;
}

void advance_euler(const ProblemSpec& spec, DiscretePath& working, double to, double dt,
                   RandomStream& rng) {
    const std::size_t d = spec.dim();
    const double from = working.back_time();
    if (!(to > from)) return;
    if (!(dt > 0.0)) throw InvalidSpec("time step must be positive");

    std::vector<double> x(working.back().begin(), working.back().end());
    std::vector<double> mu(d), sigma(d * d), xi(d);
    const double eps = 1e-12 * std::max(1.0, to);
    working.reserve(working.size() + static_cast<std::size_t>((to - from) / dt) + 2);

    double t = from;
    auto k = static_cast<long long>(std::floor(from / dt)) + 1;
    while (t < to) {
        double next = static_cast<double>(k) * dt;
        while (next <= t + eps) next = static_cast<double>(++k) * dt;
        if (next >= to - eps) next = to;
        const double h = next - t;
        const double sqrt_h = std::sqrt(h);

        spec.drift(t, working, mu);
        spec.vol(t, working, sigma);
        for (std::size_t j = 0; j < d; ++j) xi[j] = rng.normal();
        for (std::size_t i = 0; i < d; ++i) {
            double diffusion = 0.0;
            const double* row = sigma.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) diffusion += row[j] * xi[j];
            x[i] += mu[i] * h + diffusion * sqrt_h;
            if (!std::isfinite(x[i])) throw NonFiniteState(next);
        }
        working.append(next, x);
        t = next;
        ++k;
    }
}

DiscretePath euler_step_path(const ProblemSpec& spec, const DiscretePath& history, double from,
                             double to, double dt, RandomStream& rng) {
    DiscretePath working = history.prefix(from);
    const std::size_t start = working.size() - 1;
    advance_euler(spec, working, to, dt, rng);
    DiscretePath seg(working.dim());
    seg.reserve(working.size() - start);
    for (std::size_t i = start; i < working.size(); ++i) seg.append_node(working, i);
    return seg;
}

ExtendedLineage extend_lineage(const LineagePath& parent, const DiscretePath& parent_full,
                               double branch_time, double until, const ProblemSpec& spec,
                               double dt, RandomStream& rng) {
    ExtendedLineage out;
    out.lineage = parent.restricted(branch_time);
    out.full = parent_full.back_time() == branch_time ? parent_full : parent_full.prefix(branch_time);
    const std::size_t start = out.full.size() - 1;
    advance_euler(spec, out.full, until, dt, rng);
    if (out.full.size() > start + 1) {
        auto seg = std::make_shared<PathSegment>();
        seg->birth = branch_time;
        seg->stream = rng.key().particle;
        seg->path = DiscretePath(out.full.dim());
        seg->path.reserve(out.full.size() - start);
        for (std::size_t i = start; i < out.full.size(); ++i) seg->path.append_node(out.full, i);
        out.lineage.push(std::move(seg));
    }
    return out;
}

ExtendedLineage extend_lineage(const LineagePath& parent, double branch_time, double until,
                               const ProblemSpec& spec, double dt, RandomStream& rng) {
    return extend_lineage(parent, parent.restricted(branch_time).materialize(), branch_time, until,
                          spec, dt, rng);
}

std::string path_csv(const DiscretePath& path) {
    std::ostringstream os;
    os.precision(17);
    os << "t";
    for (std::size_t i = 0; i < path.dim(); ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t n = 0; n < path.size(); ++n) {
        os << path.time(n);
        for (double v : path.node(n)) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

}  // namespace branchmc
