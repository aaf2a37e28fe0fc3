#pragma once

// Correspondence construction. Two directions are in play and are kept
// exactly as the algorithms use them: nearest-point matching iterates the
// target cloud and claims the closest source point, while the score-based
// matchings iterate the source cloud and claim the best-scoring target.
// All ties break by (score, source index, target index) so results are
// reproducible and equal to exhaustive scans.

#include <vector>

#include "ticp/core.hpp"
#include "ticp/similarity.hpp"
#include "ticp/spatial.hpp"

namespace ticp {

enum class MatchKind { C, C1, C2, C3, C_CTSF, LIE0, LIE1 };

struct Correspondence {
    int source_index = -1;
    int target_index = -1;
    double score = 0.0;
};

struct MatchSet {
    MatchKind kind = MatchKind::C;
    std::vector<Correspondence> pairs;
    bool trimmed = false;
};

// For every target point, its nearest source point (ties to the smaller
// source index); score is the Euclidean distance. source_index spans the
// index's cloud. Throws std::invalid_argument on an empty target.
MatchSet closest_point(const SpatialIndex& source_index, const PointCloud& target);

// Sort ascending by (score, source, target) and keep the first
// ceil(c * (1 - tau)) pairs. tau = 0 keeps every pair (sorted). Throws
// std::invalid_argument for tau outside [0, 1) or an empty input.
MatchSet trim(const MatchSet& ms, double tau);

// For every source point, the target minimizing ||p - q|| + w_m * ctsf.
// Source positions are taken from `source` (the moved cloud), shape data
// from the descriptors. Exhaustive over all target points.
MatchSet ctsf_matching(const PointCloud& source, const PointCloud& target,
                       const std::vector<ShapeDescriptor>& source_desc,
                       const std::vector<ShapeDescriptor>& target_desc,
                       const WeightSchedule& w);

MatchSet ctsf_trimmed(const PointCloud& source, const PointCloud& target,
                      const std::vector<ShapeDescriptor>& source_desc,
                      const std::vector<ShapeDescriptor>& target_desc,
                      const WeightSchedule& w, double tau);

// For every target point, the source point with the closest eigenvalue
// triple; pure shape, no positional term.
MatchSet shape_matching(const std::vector<ShapeDescriptor>& source_desc,
                        const std::vector<ShapeDescriptor>& target_desc);

// For every source point, the target minimizing the Frobenius score
// (strategy 0) or its weighted variant with the schedule's current value
// (strategy 1). Descriptors carry the positions inside their embeddings.
MatchSet lie_matching(const std::vector<ShapeDescriptor>& source_desc,
                      const std::vector<ShapeDescriptor>& target_desc, int strategy,
                      const WeightSchedule& w);

// Variant of shape_matching scored by the Frobenius score; used when the
// shape relation itself should use the log-embedding comparison.
MatchSet lie_shape_matching(const std::vector<ShapeDescriptor>& source_desc,
                            const std::vector<ShapeDescriptor>& target_desc, int strategy,
                            const WeightSchedule& w);

}  // namespace ticp
