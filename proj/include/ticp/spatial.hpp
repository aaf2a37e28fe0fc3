#pragma once

// Exact nearest-neighbor queries and percentage-based neighborhood lists.
// Distance ties are always broken by the smaller point index so that query
// results match an exhaustive scan exactly.

#include <cstdint>
#include <vector>

#include "ticp/core.hpp"

namespace ticp {

struct NeighborList {
    int center_index = -1;
    std::vector<int> neighbor_indices;  // ascending distance, center excluded
    double sigma = 0.0;                 // from the farthest listed neighbor
};

// kd-tree over a snapshot of a cloud; falls back to exhaustive scans for
// clouds below 32 points. Queries never return the excluded index.
class SpatialIndex {
  public:
    explicit SpatialIndex(const PointCloud& cloud);

    // Index and Euclidean distance of the closest stored point.
    std::pair<int, double> nearest(const Point3& q, int exclude_index = -1) const;

    // k closest stored points, ascending (distance, index).
    std::vector<int> k_nearest(const Point3& q, int k, int exclude_index = -1) const;

    size_t size() const { return pts_.size(); }
    const Point3& point(int i) const { return pts_[static_cast<size_t>(i)]; }

  private:
    struct Node {
        int axis = -1;        // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into order_
    };

    int build(int begin, int end, int depth);

    std::vector<Point3> pts_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
    bool exhaustive_ = false;
};

SpatialIndex build_index(const PointCloud& cloud);

// Per-point lists of the ceil(k_percent/100 * (n-1)) nearest other points,
// with sigma = d_f / sqrt(ln 100) where d_f is the farthest listed distance
// (the farthest neighbor then carries weight exp(-d_f^2/sigma^2) = 0.01).
std::vector<NeighborList> neighborhoods(const PointCloud& cloud, double k_percent);

// Tolerance-guarded ceiling shared with match trimming: products that are
// mathematically integral must not round up from representation error.
int64_t guarded_ceil(double value);

}  // namespace ticp
