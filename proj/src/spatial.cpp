#include "ticp/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ticp {

namespace {

constexpr int kLeafSize = 16;
constexpr int kExhaustiveBelow = 32;

inline double coord(const Point3& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

// (distance^2, index) lexicographic order implements the global tie rule.
inline bool closer(double d2a, int ia, double d2b, int ib) {
    if (d2a != d2b) return d2a < d2b;
    return ia < ib;
}

}  // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud) : pts_(cloud.points) {
    if (pts_.empty()) throw std::invalid_argument("build_index: empty cloud");
    order_.resize(pts_.size());
    for (size_t i = 0; i < pts_.size(); ++i) order_[i] = static_cast<int>(i);
    if (pts_.size() < kExhaustiveBelow) {
        exhaustive_ = true;
        return;
    }
    nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<int>(pts_.size()), 0);
}

int SpatialIndex::build(int begin, int end, int depth) {
    Node node;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    // split along the widest extent; falls back to cycling axes on exact ties
    double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double hi[3] = {-lo[0], -lo[1], -lo[2]};
    for (int i = begin; i < end; ++i) {
        const Point3& p = pts_[static_cast<size_t>(order_[static_cast<size_t>(i)])];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], coord(p, a));
            hi[a] = std::max(hi[a], coord(p, a));
        }
    }
    int axis = depth % 3;
    double widest = hi[axis] - lo[axis];
    for (int a = 0; a < 3; ++a)
        if (hi[a] - lo[a] > widest) {
            widest = hi[a] - lo[a];
            axis = a;
        }

    int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         double ca = coord(pts_[static_cast<size_t>(a)], axis);
                         double cb = coord(pts_[static_cast<size_t>(b)], axis);
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });
    node.axis = axis;
    node.split = coord(pts_[static_cast<size_t>(order_[static_cast<size_t>(mid)])], axis);

    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(begin, mid, depth + 1);
    int right = build(mid, end, depth + 1);
    nodes_[static_cast<size_t>(self)].left = left;
    nodes_[static_cast<size_t>(self)].right = right;
    return self;
}

std::pair<int, double> SpatialIndex::nearest(const Point3& q, int exclude_index) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_i = -1;

    auto consider = [&](int idx) {
        if (idx == exclude_index) return;
        double d2 = (pts_[static_cast<size_t>(idx)] - q).squared_norm();
        if (best_i < 0 || closer(d2, idx, best_d2, best_i)) {
            best_d2 = d2;
            best_i = idx;
        }
    };

    if (exhaustive_) {
        for (int idx : order_) consider(idx);
        return {best_i, std::sqrt(best_d2)};
    }

    auto walk = [&](auto&& self, int ni) -> void {
        const Node& node = nodes_[static_cast<size_t>(ni)];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) consider(order_[static_cast<size_t>(i)]);
            return;
        }
        double delta = coord(q, node.axis) - node.split;
        int near = delta < 0.0 ? node.left : node.right;
        int far = delta < 0.0 ? node.right : node.left;
        self(self, near);
        // <= keeps equal-distance candidates reachable for the index tie rule
        if (delta * delta <= best_d2) self(self, far);
    };
    walk(walk, root_);
    return {best_i, std::sqrt(best_d2)};
}

std::vector<int> SpatialIndex::k_nearest(const Point3& q, int k, int exclude_index) const {
    const int n = static_cast<int>(pts_.size()) - (exclude_index >= 0 ? 1 : 0);
    if (k <= 0 || k > n)
        throw std::invalid_argument("k_nearest: k out of range");

    // flat max-heap of (d2, index); root is the current worst kept candidate
    std::vector<std::pair<double, int>> heap;
    heap.reserve(static_cast<size_t>(k));
    auto worse = [](const std::pair<double, int>& a, const std::pair<double, int>& b) {
        // max-heap comparator: "a sorts before b" when a is a better (closer) pair
        return closer(a.first, a.second, b.first, b.second);
    };

    auto consider = [&](int idx) {
        if (idx == exclude_index) return;
        double d2 = (pts_[static_cast<size_t>(idx)] - q).squared_norm();
        if (static_cast<int>(heap.size()) < k) {
            heap.emplace_back(d2, idx);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (closer(d2, idx, heap.front().first, heap.front().second)) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = {d2, idx};
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    };

    if (exhaustive_) {
        for (int idx : order_) consider(idx);
    } else {
        auto walk = [&](auto&& self, int ni) -> void {
            const Node& node = nodes_[static_cast<size_t>(ni)];
            if (node.axis < 0) {
                for (int i = node.begin; i < node.end; ++i)
                    consider(order_[static_cast<size_t>(i)]);
                return;
            }
            double delta = coord(q, node.axis) - node.split;
            int near = delta < 0.0 ? node.left : node.right;
            int far = delta < 0.0 ? node.right : node.left;
            self(self, near);
            if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first)
                self(self, far);
        };
        walk(walk, root_);
    }

    std::sort(heap.begin(), heap.end(), [](const auto& a, const auto& b) {
        return closer(a.first, a.second, b.first, b.second);
    });
    std::vector<int> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) out.push_back(idx);
    return out;
}

SpatialIndex build_index(const PointCloud& cloud) { return SpatialIndex(cloud); }

int64_t guarded_ceil(double value) {
    double guard = 1e-12 * std::max(1.0, std::fabs(value));
    return static_cast<int64_t>(std::ceil(value - guard));
}

std::vector<NeighborList> neighborhoods(const PointCloud& cloud, double k_percent) {
    const int n = static_cast<int>(cloud.size());
    if (n < 2) throw std::invalid_argument("neighborhoods: need at least 2 points");
    if (!(k_percent > 0.0) || k_percent > 100.0)
        throw std::invalid_argument("neighborhoods: k_percent must lie in (0, 100]");

    int count = static_cast<int>(guarded_ceil(k_percent / 100.0 * (n - 1)));
    count = std::clamp(count, 1, n - 1);

    static const double kInvSqrtLn100 = 1.0 / std::sqrt(std::log(100.0));

    SpatialIndex index(cloud);
    std::vector<NeighborList> lists;
    lists.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        NeighborList nl;
        nl.center_index = i;
        nl.neighbor_indices = index.k_nearest(cloud.points[static_cast<size_t>(i)], count, i);
        int far = nl.neighbor_indices.back();
        double d_f = (cloud.points[static_cast<size_t>(far)] -
                      cloud.points[static_cast<size_t>(i)]).norm();
        if (d_f <= 0.0)
            throw std::invalid_argument("neighborhoods: coincident duplicate points give zero scale");
        nl.sigma = d_f * kInvSqrtLn100;
        lists.push_back(std::move(nl));
    }
    return lists;
}

}  // namespace ticp
