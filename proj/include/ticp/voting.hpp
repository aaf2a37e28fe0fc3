#pragma once

// Second-order orientation tensor fields built in two stages: an isotropic
// pass that votes unit directions into a symmetric tensor, and an
// anisotropic pass that votes arc tangents weighted by arc length. The
// eigen-frame of the isotropic tensor supplies the local tangent plane
// (e1, e2) and normal direction (e3).

#include <vector>

#include "ticp/core.hpp"
#include "ticp/spatial.hpp"

namespace ticp {

// Symmetric 3x3 tensor stored as its 6 independent entries, so symmetry is
// exact by construction.
struct SymTensor3 {
    double xx = 0.0, xy = 0.0, xz = 0.0, yy = 0.0, yz = 0.0, zz = 0.0;

    static SymTensor3 from_diag(double a, double b, double c) {
        SymTensor3 t;
        t.xx = a;
        t.yy = b;
        t.zz = c;
        return t;
    }
    // w * (v v^T) accumulated in place
    void add_outer(const Vec3& v, double w) {
        xx += w * v.x * v.x;
        xy += w * v.x * v.y;
        xz += w * v.x * v.z;
        yy += w * v.y * v.y;
        yz += w * v.y * v.z;
        zz += w * v.z * v.z;
    }
    Mat3 to_mat3() const {
        Mat3 m;
        m(0, 0) = xx; m(0, 1) = xy; m(0, 2) = xz;
        m(1, 0) = xy; m(1, 1) = yy; m(1, 2) = yz;
        m(2, 0) = xz; m(2, 1) = yz; m(2, 2) = zz;
        return m;
    }
    double trace() const { return xx + yy + zz; }
    SymTensor3 operator+(const SymTensor3& o) const {
        return {xx + o.xx, xy + o.xy, xz + o.xz, yy + o.yy, yz + o.yz, zz + o.zz};
    }
    SymTensor3 operator*(double s) const {
        return {xx * s, xy * s, xz * s, yy * s, yz * s, zz * s};
    }
};

struct EigenFrame {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;  // descending
    Vec3 e1, e2, e3;  // orthonormal, right-handed
};

struct ArcGeometry {
    double phi_s = 0.0;   // elevation of v above the (e1, e2) plane, in [0, pi/2]
    double d_e = 0.0;     // arc length, >= ||v||
    Vec3 xi_s;            // unit tangent of the arc at s
};

// T(p) = sum_s exp(-||v_ps||^2 / sigma^2) * (v_hat v_hat^T).
// Throws if a neighbor coincides with p (unit direction undefined).
SymTensor3 isotropic_tensor(const Point3& p, const std::vector<Point3>& neighbors,
                            double sigma);

// Eigen-decomposition with descending eigenvalues; each eigenvector's
// largest-magnitude component is made non-negative, then e3 is flipped if
// needed so the frame is right-handed.
EigenFrame eigen_frame(const SymTensor3& T);

// Geometry of the circular arc tangent to the (e1, e2) plane at p passing
// through s: radius ||v|| / (2 sin phi), subtended angle 2 phi. When s lies
// directly above p (no in-plane component) the tangent is taken as e3; the
// 45-degree cap zeroes such votes anyway.
ArcGeometry arc_geometry(const Point3& p, const Point3& s, const EigenFrame& frame);

// exp(-d_e / sigma^2) when phi_s <= phi_max, else 0. The exponent uses the
// arc length to the first power.
double anisotropic_weight(const ArcGeometry& arc, double sigma, double phi_max_rad);

// S(p) = sum over p's own neighbor list of g(p,s) * (xi xi^T).
SymTensor3 anisotropic_tensor(int p_index, const PointCloud& cloud,
                              const std::vector<NeighborList>& lists,
                              const std::vector<EigenFrame>& frames,
                              double phi_max_rad);

struct TensorField {
    std::vector<NeighborList> lists;
    std::vector<SymTensor3> isotropic;
    std::vector<EigenFrame> frames;      // frames of the isotropic tensors
    std::vector<SymTensor3> anisotropic; // S(p), the shape tensors
};

struct TensorFieldOptions {
    double phi_max_rad = deg_to_rad(45.0);
    // When set, votes are accumulated at the receiving point from every
    // voter whose neighbor list contains it, using the voter's frame and
    // scale, instead of summing over the center's own list.
    bool reverse_votes = false;
    // When set, each S(p) is divided by max(trace, 1) before use.
    bool trace_normalize = false;
};

TensorField tensor_field(const PointCloud& cloud, double k_percent,
                         const TensorFieldOptions& opts = {});

}  // namespace ticp
