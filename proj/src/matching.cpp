#include "ticp/matching.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace ticp {

namespace {

bool pair_less(const Correspondence& a, const Correspondence& b) {
    return std::tie(a.score, a.source_index, a.target_index) <
           std::tie(b.score, b.source_index, b.target_index);
}

}  // namespace

MatchSet closest_point(const SpatialIndex& source_index, const PointCloud& target) {
    if (target.points.empty()) throw std::invalid_argument("closest_point: empty target");
    MatchSet ms;
    ms.kind = MatchKind::C;
    ms.pairs.reserve(target.points.size());
    for (size_t j = 0; j < target.points.size(); ++j) {
        auto [i, dist] = source_index.nearest(target.points[j]);
        ms.pairs.push_back({i, static_cast<int>(j), dist});
    }
    return ms;
}

MatchSet trim(const MatchSet& ms, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("trim: tau must be in [0, 1)");
    if (ms.pairs.empty()) throw std::invalid_argument("trim: empty match set");
    MatchSet out = ms;
    std::sort(out.pairs.begin(), out.pairs.end(), pair_less);
    auto keep = static_cast<size_t>(guarded_ceil(static_cast<double>(out.pairs.size()) * (1.0 - tau)));
    if (keep == 0) throw std::invalid_argument("trim: nothing left after trimming");
    out.pairs.resize(std::min(keep, out.pairs.size()));
    out.trimmed = true;
    if (out.kind == MatchKind::C) out.kind = MatchKind::C1;
    if (out.kind == MatchKind::C2) out.kind = MatchKind::C3;
    return out;
}

MatchSet ctsf_matching(const PointCloud& source, const PointCloud& target,
                       const std::vector<ShapeDescriptor>& source_desc,
                       const std::vector<ShapeDescriptor>& target_desc,
                       const WeightSchedule& w) {
    if (source.points.empty() || target.points.empty())
        throw std::invalid_argument("ctsf_matching: empty cloud");
    if (source.points.size() != source_desc.size() || target.points.size() != target_desc.size())
        throw std::invalid_argument("ctsf_matching: descriptor count mismatch");
    MatchSet ms;
    ms.kind = MatchKind::C2;
    ms.pairs.reserve(source.points.size());
    for (size_t i = 0; i < source.points.size(); ++i) {
        int best_j = 0;
        double best = d_cm(source.points[i], target.points[0], source_desc[i], target_desc[0], w);
        for (size_t j = 1; j < target.points.size(); ++j) {
            double s = d_cm(source.points[i], target.points[j], source_desc[i], target_desc[j], w);
            if (s < best) {
                best = s;
                best_j = static_cast<int>(j);
            }
        }
        ms.pairs.push_back({static_cast<int>(i), best_j, best});
    }
    return ms;
}

MatchSet ctsf_trimmed(const PointCloud& source, const PointCloud& target,
                      const std::vector<ShapeDescriptor>& source_desc,
                      const std::vector<ShapeDescriptor>& target_desc,
                      const WeightSchedule& w, double tau) {
    return trim(ctsf_matching(source, target, source_desc, target_desc, w), tau);
}

MatchSet shape_matching(const std::vector<ShapeDescriptor>& source_desc,
                        const std::vector<ShapeDescriptor>& target_desc) {
    if (source_desc.empty() || target_desc.empty())
        throw std::invalid_argument("shape_matching: empty descriptor set");
    MatchSet ms;
    ms.kind = MatchKind::C_CTSF;
    ms.pairs.reserve(target_desc.size());
    for (size_t j = 0; j < target_desc.size(); ++j) {
        int best_i = 0;
        double best = ctsf(source_desc[0], target_desc[j]);
        for (size_t i = 1; i < source_desc.size(); ++i) {
            double s = ctsf(source_desc[i], target_desc[j]);
            if (s < best) {
                best = s;
                best_i = static_cast<int>(i);
            }
        }
        ms.pairs.push_back({best_i, static_cast<int>(j), best});
    }
    return ms;
}

MatchSet lie_matching(const std::vector<ShapeDescriptor>& source_desc,
                      const std::vector<ShapeDescriptor>& target_desc, int strategy,
                      const WeightSchedule& w) {
    if (source_desc.empty() || target_desc.empty())
        throw std::invalid_argument("lie_matching: empty descriptor set");
    if (strategy != 0 && strategy != 1)
        throw std::invalid_argument("lie_matching: strategy must be 0 or 1");
    MatchSet ms;
    ms.kind = strategy == 0 ? MatchKind::LIE0 : MatchKind::LIE1;
    ms.pairs.reserve(source_desc.size());
    for (size_t i = 0; i < source_desc.size(); ++i) {
        int best_j = 0;
        double best = strategy == 0 ? frob_score(source_desc[i], target_desc[0])
                                    : weighted_frob_score(source_desc[i], target_desc[0], w);
        for (size_t j = 1; j < target_desc.size(); ++j) {
            double s = strategy == 0 ? frob_score(source_desc[i], target_desc[j])
                                     : weighted_frob_score(source_desc[i], target_desc[j], w);
            if (s < best) {
                best = s;
                best_j = static_cast<int>(j);
            }
        }
        ms.pairs.push_back({static_cast<int>(i), best_j, best});
    }
    return ms;
}

MatchSet lie_shape_matching(const std::vector<ShapeDescriptor>& source_desc,
                            const std::vector<ShapeDescriptor>& target_desc, int strategy,
                            const WeightSchedule& w) {
    if (source_desc.empty() || target_desc.empty())
        throw std::invalid_argument("lie_shape_matching: empty descriptor set");
    if (strategy != 0 && strategy != 1)
        throw std::invalid_argument("lie_shape_matching: strategy must be 0 or 1");
    MatchSet ms;
    ms.kind = MatchKind::C_CTSF;
    ms.pairs.reserve(target_desc.size());
    for (size_t j = 0; j < target_desc.size(); ++j) {
        int best_i = 0;
        double best = strategy == 0 ? frob_score(source_desc[0], target_desc[j])
                                    : weighted_frob_score(source_desc[0], target_desc[j], w);
        for (size_t i = 1; i < source_desc.size(); ++i) {
            double s = strategy == 0 ? frob_score(source_desc[i], target_desc[j])
                                     : weighted_frob_score(source_desc[i], target_desc[j], w);
            if (s < best) {
                best = s;
                best_i = static_cast<int>(i);
            }
        }
        ms.pairs.push_back({best_i, static_cast<int>(j), best});
    }
    return ms;
}

}  // namespace ticp
