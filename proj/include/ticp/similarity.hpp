#pragma once

// Per-point shape descriptors and the pairwise scores built on them: the
// eigenvalue comparison score, the distance-plus-shape score with its
// geometric weight schedule, and the Frobenius scores over log-embedding
// differences.

#include <array>
#include <vector>

#include "ticp/core.hpp"
#include "ticp/lie.hpp"
#include "ticp/voting.hpp"

namespace ticp {

// Everything derived from one tensor-field pass over a cloud. eigenvalues
// come from the raw shape tensor; the embedding treats the point as the
// mean of a Gaussian whose covariance is the regularized tensor. phi caches
// the linear factor mapping a mean to the translation block, so the
// embedding can be refreshed for a moved point without redoing the
// logarithm.
struct ShapeDescriptor {
    Point3 point;
    std::array<double, 3> eigenvalues{};  // descending
    LogEmbedding embedding;
    UpperTri3 phi;  // T12 = phi * point
};

// Geometric schedule w_m = w0 * b^m, treated as exactly zero once it falls
// below zero_cutoff.
struct WeightSchedule {
    double w0 = 0.0;
    double b = 0.5;
    int m = 0;
    double zero_cutoff = 1e-8;

    double current() const;
};

struct DescriptorOptions {
    double eps_rel = 1e-6;         // regularization before inversion
    bool tensor_prescale = false;  // divide tensors by max(trace, 1) first
};

// One descriptor per point; field must come from tensor_field on the same
// cloud. Throws std::invalid_argument on size mismatch.
std::vector<ShapeDescriptor> build_descriptors(const PointCloud& cloud,
                                               const std::vector<SymTensor3>& field,
                                               const DescriptorOptions& opts = {});

// Rebuild the position-dependent parts of a descriptor for a moved point;
// the eigenvalues and triangular blocks are unchanged.
ShapeDescriptor moved_descriptor(const ShapeDescriptor& d, const Point3& new_point);

// Sum of squared differences of sorted eigenvalues.
double ctsf(const ShapeDescriptor& dp, const ShapeDescriptor& dq);

// ||p - q|| + w_m * ctsf(dp, dq); p and q are passed separately so callers
// can score at moved positions.
double d_cm(const Point3& p, const Point3& q, const ShapeDescriptor& dp,
            const ShapeDescriptor& dq, const WeightSchedule& w);

struct LieDifference {
    UpperTri3 D11;
    Vec3 D12;
};

// Blockwise difference of the two log-embeddings.
LieDifference lie_difference(const ShapeDescriptor& dp, const ShapeDescriptor& dq);

// ||D11||_F^2 + ||D12||^2.
double frob_score(const ShapeDescriptor& dp, const ShapeDescriptor& dq);

// w_m * ||D11||_F^2 + ||D12||^2.
double weighted_frob_score(const ShapeDescriptor& dp, const ShapeDescriptor& dq,
                           const WeightSchedule& w);

// Default starting weight: 10 * (median nearest-neighbor distance in the
// target) / (median ctsf over a fixed deterministic sample of source-target
// pairs). Returns 0 when the shape scores are all (near) zero, which
// degrades the schedule to plain distance matching.
double calibrate_w0(const PointCloud& target,
                    const std::vector<ShapeDescriptor>& source_desc,
                    const std::vector<ShapeDescriptor>& target_desc);

}  // namespace ticp
