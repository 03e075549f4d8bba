#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "branchmc/path.hpp"
#include "branchmc/problem.hpp"
#include "branchmc/rng.hpp"

namespace branchmc {

/// Immutable piece of one particle's trajectory. The first node is the
/// junction with the previous segment.
struct PathSegment {
    double birth = 0.0;
    DiscretePath path;
    /// Particle stream that drove this segment; kTreeStream for a given prefix.
    std::uint32_t stream = kTreeStream;
};

/// A particle's full trajectory as a chain of shared segments. Siblings
/// reference the same ancestor segment objects.
class LineagePath {
public:
    LineagePath() = default;
    /// Root lineage whose only segment is the given history.
    explicit LineagePath(DiscretePath history);

    const std::vector<std::shared_ptr<const PathSegment>>& segments() const noexcept {
        return segments_;
    }
    double start_time() const { return segments_.front()->path.front_time(); }
    double end_time() const { return segments_.back()->path.back_time(); }
    std::size_t dim() const { return segments_.front()->path.dim(); }

    /// Concatenation with junction nodes de-duplicated.
    DiscretePath materialize() const;
    /// Lineage restricted to [start, t]; segments wholly before t are shared,
    /// a straddling segment is copied and truncated.
    LineagePath restricted(double t) const;

    void push(std::shared_ptr<const PathSegment> seg) { segments_.push_back(std::move(seg)); }

private:
    std::vector<std::shared_ptr<const PathSegment>> segments_;
};

/// Euler scheme on the regular grid {k*dt} with `from` and `to` inserted as
/// nodes. Coefficients are frozen at the last node of the interpolated
/// path. Appends nodes to `working`, which must end at `from`.
/// Throws NonFiniteState if a coordinate becomes non-finite.
void advance_euler(const ProblemSpec& spec, DiscretePath& working, double to, double dt,
                   RandomStream& rng);

/// Segment of the Euler path from `from` (the end of history) to `to`.
DiscretePath euler_step_path(const ProblemSpec& spec, const DiscretePath& history, double from,
                             double to, double dt, RandomStream& rng);

struct ExtendedLineage {
    LineagePath lineage;
    /// Materialized full path, ending at `until`.
    DiscretePath full;
};

/// Child lineage: parent restricted to [start, branch_time] plus a fresh
/// segment on [branch_time, until] driven by `rng`.
ExtendedLineage extend_lineage(const LineagePath& parent, double branch_time, double until,
                               const ProblemSpec& spec, double dt, RandomStream& rng);

/// Same, reusing an already materialized parent path (must end at
/// branch_time or later).
ExtendedLineage extend_lineage(const LineagePath& parent, const DiscretePath& parent_full,
                               double branch_time, double until, const ProblemSpec& spec,
                               double dt, RandomStream& rng);

/// "t,x1,...,xd" lines with a header, for debugging.
std::string path_csv(const DiscretePath& path);

}  // namespace branchmc
