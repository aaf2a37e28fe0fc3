#pragma once

// Geometric primitives shared by every other module: 3-vectors, row-major
// 3x3 matrices, rigid transforms, point clouds, and the registration error
// metrics. All arithmetic is double precision; rotations are stored as
// explicit matrices and validated on construction.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ticp {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    Vec3 normalized() const { return *this / norm(); }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

using Point3 = Vec3;

// Dense 3x3 matrix, row-major storage.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    static Mat3 zero() { return Mat3{}; }

    double& operator()(int r, int c) { return m[static_cast<size_t>(3 * r + c)]; }
    double operator()(int r, int c) const { return m[static_cast<size_t>(3 * r + c)]; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    double trace() const { return m[0] + m[4] + m[8]; }
    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    double frobenius_norm() const {
        double s = 0.0;
        for (double e : m) s += e * e;
        return std::sqrt(s);
    }
};

// Largest entrywise deviation of R'R from the identity.
double orthonormality_defect(const Mat3& R);
bool is_rotation(const Mat3& R, double tol = 1e-12);

// Gram-Schmidt on columns, for re-normalizing accumulated products.
Mat3 orthonormalize(const Mat3& R);

// Rodrigues rotation about a unit axis; angle in radians, right-hand rule.
Mat3 rotation_about_axis(const Vec3& axis, double angle_rad);

inline double deg_to_rad(double d) { return d * (M_PI / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / M_PI); }

struct RigidTransform {
    Mat3 R = Mat3::identity();
    Vec3 t{};
};

// Validating constructor: throws std::invalid_argument unless R is orthonormal
// with det 1 to within 1e-12 per entry.
RigidTransform make_rigid(const Mat3& R, const Vec3& t);

RigidTransform identity_transform();
Vec3 apply_point(const RigidTransform& T, const Vec3& p);
RigidTransform compose(const RigidTransform& T1, const RigidTransform& T2);
RigidTransform invert(const RigidTransform& T);

struct PointCloud {
    std::vector<Point3> points;
    std::string label;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T);

Vec3 centroid(const std::vector<Point3>& pts);

// Mean squared residual (1/n)*sum ||y_i - (R x_i + t)||^2 over index-aligned
// pairs. Throws std::invalid_argument on length mismatch or empty input.
double mse(const std::vector<Point3>& X, const std::vector<Point3>& Y,
           const RigidTransform& T);
double mrms(const std::vector<Point3>& X, const std::vector<Point3>& Y,
            const RigidTransform& T);

// Geodesic angle between two rotations, radians. Validates both inputs.
double rotation_geodesic_error(const Mat3& R, const Mat3& R_gt);

}  // namespace ticp
