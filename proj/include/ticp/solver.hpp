#pragma once

// Closed-form least-squares rigid alignment of paired points: the rotation
// comes from the principal eigenvector of a 4x4 symmetric matrix assembled
// from the cross-covariance, read as a unit quaternion; the translation
// follows from the centroids. A variant mixes a second set of shape-matched
// points into the covariance with a weight.

#include <array>
#include <vector>

#include "ticp/core.hpp"

namespace ticp {

struct CrossCovariance {
    Mat3 sigma_xy;  // (1/n) sum (y - mu_y)(x - mu_x)^T
    Vec3 centroid_x;
    Vec3 centroid_y;
};

struct QuatVec {
    double v0 = 1.0, v1 = 0.0, v2 = 0.0, v3 = 0.0;  // scalar first
};

// Throws std::invalid_argument when sizes differ or n < 3.
CrossCovariance cross_covariance(const std::vector<Point3>& X, const std::vector<Point3>& Y);

// Covariance of the mixed points x + omega * s against y, computed without
// forming the mixed points: (1/n) sum y (x + omega s)^T - mu_y (mu_x + omega mu_s)^T.
CrossCovariance swc_covariance(const std::vector<Point3>& X, const std::vector<Point3>& S,
                               const std::vector<Point3>& Y, double omega);

// 4x4 symmetric matrix whose principal eigenvector is the optimal rotation
// quaternion: top-left trace(sigma_xy), first row/column from the
// antisymmetric part, lower-right block sigma_xy + sigma_xy^T - trace * I.
std::array<std::array<double, 4>, 4> build_M(const CrossCovariance& cc);

// Unit eigenvector of the algebraically largest eigenvalue (Jacobi); sign
// fixed so v0 >= 0, falling back to the first nonzero component. Sets
// *degenerate when the top eigenvalue is (nearly) repeated, i.e. the
// optimal rotation is not unique. relative gap threshold 1e-9.
QuatVec principal_eigenvector_4(const std::array<std::array<double, 4>, 4>& M,
                                bool* degenerate = nullptr);

// Standard scalar-first unit-quaternion rotation matrix. Throws
// std::invalid_argument when the input is not unit within 1e-12.
Mat3 quaternion_to_rotation(const QuatVec& v);

// Optimal rigid transform mapping X onto Y in least squares. When S is
// given (same length as X), the covariance mixes x + omega * s instead of
// x alone. The degenerate flag, when provided, reports a non-unique
// optimum (e.g. collinear inputs).
RigidTransform horn_solve(const std::vector<Point3>& X, const std::vector<Point3>& Y,
                          const std::vector<Point3>* S = nullptr, double omega = 0.0,
                          bool* degenerate = nullptr);

}  // namespace ticp
