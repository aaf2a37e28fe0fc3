#include "ticp/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace ticp {

double orthonormality_defect(const Mat3& R) {
    Mat3 G = R.transposed() * R;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double want = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::fabs(G(i, j) - want));
        }
    return worst;
}

bool is_rotation(const Mat3& R, double tol) {
    return orthonormality_defect(R) <= tol && std::fabs(R.det() - 1.0) <= tol;
}

Mat3 orthonormalize(const Mat3& R) {
    Vec3 c0{R(0, 0), R(1, 0), R(2, 0)};
    Vec3 c1{R(0, 1), R(1, 1), R(2, 1)};
    c0 = c0.normalized();
    c1 = (c1 - c0 * c0.dot(c1)).normalized();
    Vec3 c2 = c0.cross(c1);
    Mat3 out;
    for (int i = 0; i < 3; ++i) {
        out(i, 0) = c0[i];
        out(i, 1) = c1[i];
        out(i, 2) = c2[i];
    }
    return out;
}

Mat3 rotation_about_axis(const Vec3& axis, double angle_rad) {
    Vec3 a = axis.normalized();
    double c = std::cos(angle_rad), s = std::sin(angle_rad), v = 1.0 - c;
    Mat3 R;
    R(0, 0) = c + a.x * a.x * v;
    R(0, 1) = a.x * a.y * v - a.z * s;
    R(0, 2) = a.x * a.z * v + a.y * s;
    R(1, 0) = a.y * a.x * v + a.z * s;
    R(1, 1) = c + a.y * a.y * v;
    R(1, 2) = a.y * a.z * v - a.x * s;
    R(2, 0) = a.z * a.x * v - a.y * s;
    R(2, 1) = a.z * a.y * v + a.x * s;
    R(2, 2) = c + a.z * a.z * v;
    return R;
}

RigidTransform make_rigid(const Mat3& R, const Vec3& t) {
    if (!is_rotation(R))
        throw std::invalid_argument("make_rigid: matrix is not a rotation (orthonormality/det defect above 1e-12)");
    return RigidTransform{R, t};
}

RigidTransform identity_transform() { return RigidTransform{}; }

Vec3 apply_point(const RigidTransform& T, const Vec3& p) { return T.R * p + T.t; }

RigidTransform compose(const RigidTransform& T1, const RigidTransform& T2) {
    return RigidTransform{T1.R * T2.R, T1.R * T2.t + T1.t};
}

RigidTransform invert(const RigidTransform& T) {
    Mat3 Rt = T.R.transposed();
    return RigidTransform{Rt, -(Rt * T.t)};
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T) {
    PointCloud out;
    out.label = cloud.label;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.points.push_back(apply_point(T, p));
    return out;
}

Vec3 centroid(const std::vector<Point3>& pts) {
    Vec3 c;
    for (const auto& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

double mse(const std::vector<Point3>& X, const std::vector<Point3>& Y,
           const RigidTransform& T) {
    if (X.size() != Y.size())
        throw std::invalid_argument("mse: correspondence length mismatch");
    if (X.empty()) throw std::invalid_argument("mse: empty correspondence");
    double acc = 0.0;
    for (size_t i = 0; i < X.size(); ++i)
        acc += (Y[i] - apply_point(T, X[i])).squared_norm();
    return acc / static_cast<double>(X.size());
}

double mrms(const std::vector<Point3>& X, const std::vector<Point3>& Y,
            const RigidTransform& T) {
    return std::sqrt(mse(X, Y, T));
}

double rotation_geodesic_error(const Mat3& R, const Mat3& R_gt) {
    if (!is_rotation(R, 1e-9) || !is_rotation(R_gt, 1e-9))
        throw std::invalid_argument("rotation_geodesic_error: input is not a rotation");
    Mat3 G = R.transposed() * R_gt;
    double c = (G.trace() - 1.0) / 2.0;
    c = std::clamp(c, -1.0, 1.0);
    // |sin| from the skew part keeps full precision near zero, where
    // acos of the clamped cosine bottoms out around 2e-8.
    Mat3 skew = G - G.transposed();
    double s = skew.frobenius_norm() / (2.0 * std::sqrt(2.0));
    return std::atan2(s, c);
}

}  // namespace ticp
