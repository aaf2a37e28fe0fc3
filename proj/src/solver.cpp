#include "ticp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ticp/jacobi.hpp"

namespace ticp {

CrossCovariance cross_covariance(const std::vector<Point3>& X, const std::vector<Point3>& Y) {
    if (X.size() != Y.size()) throw std::invalid_argument("cross_covariance: size mismatch");
    if (X.size() < 3) throw std::invalid_argument("cross_covariance: need at least 3 pairs");
    size_t n = X.size();
    CrossCovariance cc;
    for (size_t i = 0; i < n; ++i) {
        cc.centroid_x += X[i];
        cc.centroid_y += Y[i];
    }
    cc.centroid_x = cc.centroid_x / static_cast<double>(n);
    cc.centroid_y = cc.centroid_y / static_cast<double>(n);
    Mat3 acc = Mat3::zero();
    for (size_t i = 0; i < n; ++i) {
        Vec3 dy = Y[i] - cc.centroid_y;
        Vec3 dx = X[i] - cc.centroid_x;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) acc(r, c) += dy[r] * dx[c];
    }
    cc.sigma_xy = acc * (1.0 / static_cast<double>(n));
    return cc;
}

CrossCovariance swc_covariance(const std::vector<Point3>& X, const std::vector<Point3>& S,
                               const std::vector<Point3>& Y, double omega) {
    if (X.size() != Y.size() || X.size() != S.size())
        throw std::invalid_argument("swc_covariance: size mismatch");
    if (X.size() < 3) throw std::invalid_argument("swc_covariance: need at least 3 triples");
    size_t n = X.size();
    CrossCovariance cc;
    Vec3 mu_s;
    for (size_t i = 0; i < n; ++i) {
        cc.centroid_x += X[i];
        cc.centroid_y += Y[i];
        mu_s += S[i];
    }
    double inv_n = 1.0 / static_cast<double>(n);
    cc.centroid_x = cc.centroid_x * inv_n;
    cc.centroid_y = cc.centroid_y * inv_n;
    mu_s = mu_s * inv_n;

    Mat3 acc = Mat3::zero();
    for (size_t i = 0; i < n; ++i) {
        Vec3 mixed = X[i] + omega * S[i];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) acc(r, c) += Y[i][r] * mixed[c];
    }
    Vec3 mu_mixed = cc.centroid_x + omega * mu_s;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            acc(r, c) = acc(r, c) * inv_n - cc.centroid_y[r] * mu_mixed[c];
    cc.sigma_xy = acc;
    // the mixed centroid stands in for centroid_x downstream
    cc.centroid_x = mu_mixed;
    return cc;
}

std::array<std::array<double, 4>, 4> build_M(const CrossCovariance& cc) {
    const Mat3& S = cc.sigma_xy;
    Mat3 A = S - S.transposed();
    double tr = S.trace();
    std::array<std::array<double, 4>, 4> M{};
    M[0][0] = tr;
    M[0][1] = A(1, 2);
    M[0][2] = A(2, 0);
    M[0][3] = A(0, 1);
    M[1][0] = M[0][1];
    M[2][0] = M[0][2];
    M[3][0] = M[0][3];
    Mat3 B = S + S.transposed();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) M[r + 1][c + 1] = B(r, c) - (r == c ? tr : 0.0);
    return M;
}

QuatVec principal_eigenvector_4(const std::array<std::array<double, 4>, 4>& M,
                                bool* degenerate) {
    JacobiResult<4> eig = jacobi_symmetric<4>(M);
    if (degenerate) {
        double span = std::abs(eig.eigenvalues[0] - eig.eigenvalues[3]);
        double gap = std::abs(eig.eigenvalues[0] - eig.eigenvalues[1]);
        *degenerate = gap < 1e-9 * std::max(span, 1e-300);
    }
    const std::array<double, 4>& v = eig.eigenvectors[0];
    double flip = 1.0;
    for (double c : v) {
        if (c != 0.0) {
            flip = c > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    return {v[0] * flip, v[1] * flip, v[2] * flip, v[3] * flip};
}

Mat3 quaternion_to_rotation(const QuatVec& v) {
    double n = v.v0 * v.v0 + v.v1 * v.v1 + v.v2 * v.v2 + v.v3 * v.v3;
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("quaternion_to_rotation: input is not a unit quaternion");
    Mat3 R;
    R(0, 0) = 1 - 2 * (v.v2 * v.v2 + v.v3 * v.v3);
    R(0, 1) = 2 * (v.v1 * v.v2 - v.v0 * v.v3);
    R(0, 2) = 2 * (v.v1 * v.v3 + v.v0 * v.v2);
    R(1, 0) = 2 * (v.v1 * v.v2 + v.v0 * v.v3);
    R(1, 1) = 1 - 2 * (v.v1 * v.v1 + v.v3 * v.v3);
    R(1, 2) = 2 * (v.v2 * v.v3 - v.v0 * v.v1);
    R(2, 0) = 2 * (v.v1 * v.v3 - v.v0 * v.v2);
    R(2, 1) = 2 * (v.v2 * v.v3 + v.v0 * v.v1);
    R(2, 2) = 1 - 2 * (v.v1 * v.v1 + v.v2 * v.v2);
    return R;
}

RigidTransform horn_solve(const std::vector<Point3>& X, const std::vector<Point3>& Y,
                          const std::vector<Point3>* S, double omega, bool* degenerate) {
    CrossCovariance cc = S ? swc_covariance(X, *S, Y, omega) : cross_covariance(X, Y);
    QuatVec v = principal_eigenvector_4(build_M(cc), degenerate);
    // The assembled matrix's principal eigenvector encodes the target-to-
    // source alignment; conjugating gives the source-to-target rotation.
    v.v1 = -v.v1;
    v.v2 = -v.v2;
    v.v3 = -v.v3;
    Mat3 R = quaternion_to_rotation(v);
    RigidTransform out;
    out.R = R;
    out.t = cc.centroid_y - R * cc.centroid_x;
    return out;
}

}  // namespace ticp
