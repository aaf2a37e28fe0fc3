#pragma once

// Embedding of Gaussians N(mu, Sigma) into upper-triangular affine matrices
// and their matrix-log coordinates. With L the lower Cholesky factor of
// Sigma^{-1} and Z = L^{-T}, the pair (Z, mu) forms a 4x4 block matrix
// [[Z, mu], [0, 1]] whose logarithm has the closed block form
// T11 = log(Z), T12 = Phi(Z - I) * mu, with Phi the analytic limit of
// sum_{n>=0} (-1)^n C^n / (n+1). All triangular computations use inverse
// scaling-and-squaring so inputs far from the identity stay accurate.

#include "ticp/core.hpp"
#include "ticp/voting.hpp"

namespace ticp {

// Upper-triangular 3x3 matrix; rows top to bottom: (a00 a01 a02; 0 a11 a12; 0 0 a22).
struct UpperTri3 {
    double a00 = 0.0, a01 = 0.0, a02 = 0.0, a11 = 0.0, a12 = 0.0, a22 = 0.0;

    static UpperTri3 identity() { return {1.0, 0.0, 0.0, 1.0, 0.0, 1.0}; }

    UpperTri3 operator+(const UpperTri3& o) const {
        return {a00 + o.a00, a01 + o.a01, a02 + o.a02, a11 + o.a11, a12 + o.a12, a22 + o.a22};
    }
    UpperTri3 operator-(const UpperTri3& o) const {
        return {a00 - o.a00, a01 - o.a01, a02 - o.a02, a11 - o.a11, a12 - o.a12, a22 - o.a22};
    }
    UpperTri3 operator*(double s) const {
        return {a00 * s, a01 * s, a02 * s, a11 * s, a12 * s, a22 * s};
    }
    UpperTri3 operator*(const UpperTri3& o) const {
        return {a00 * o.a00,
                a00 * o.a01 + a01 * o.a11,
                a00 * o.a02 + a01 * o.a12 + a02 * o.a22,
                a11 * o.a11,
                a11 * o.a12 + a12 * o.a22,
                a22 * o.a22};
    }
    Vec3 operator*(const Vec3& v) const {
        return {a00 * v.x + a01 * v.y + a02 * v.z, a11 * v.y + a12 * v.z, a22 * v.z};
    }
    double frobenius_norm() const {
        return std::sqrt(a00 * a00 + a01 * a01 + a02 * a02 + a11 * a11 + a12 * a12 + a22 * a22);
    }
    double deviation_from_identity() const {
        UpperTri3 d = *this - identity();
        return d.frobenius_norm();
    }
    Mat3 to_mat3() const {
        Mat3 m = Mat3::zero();
        m(0, 0) = a00; m(0, 1) = a01; m(0, 2) = a02;
        m(1, 1) = a11; m(1, 2) = a12;
        m(2, 2) = a22;
        return m;
    }
};

// Back-substitution inverse; requires nonzero diagonal.
UpperTri3 ut_inverse(const UpperTri3& U);
// Triangular square root; requires positive diagonal.
UpperTri3 ut_sqrt(const UpperTri3& U);

struct GaussianModel {
    Vec3 mu;
    SymTensor3 sigma_mat;  // strictly positive definite
};

struct AffinePlus {
    UpperTri3 Z;  // positive diagonal
    Vec3 mu;
};

struct LogEmbedding {
    UpperTri3 T11;
    Vec3 T12;
};

// S + eps*I with eps = eps_rel * max(trace(S), 1).
SymTensor3 regularize(const SymTensor3& S, double eps_rel);

// L^{-T} where Sigma^{-1} = L L^T, L lower triangular with positive diagonal.
// Throws std::domain_error when Sigma is not strictly positive definite.
UpperTri3 cholesky_inverse_factor(const SymTensor3& Sigma);

AffinePlus embed(const GaussianModel& g);

// Principal logarithm of an upper-triangular matrix with positive diagonal,
// by repeated triangular square roots until within 0.25 of the identity,
// then the alternating series to 1e-16 term tolerance, scaled back by 2^k.
UpperTri3 log_pdut(const UpperTri3& U);

// Phi(C) with C = U - I: the limit of sum (-1)^n C^n/(n+1), evaluated under
// the same square-root scaling as log_pdut via Phi(C) = 2 Phi(W - I) (W + I)^{-1}
// with W = sqrt(U). Returns the identity at C = 0.
UpperTri3 phi_factor(const UpperTri3& C);

LogEmbedding log_embedding(const AffinePlus& A);

// Inverse of log_embedding: the 4x4 exponential restricted to the block
// structure, computed by scaling-and-squaring. Exposed for round-trip
// checks and the log-Euclidean operations.
AffinePlus exp_affine(const LogEmbedding& L);

// The group product on Gaussians matching matrix multiplication of the
// embeddings: mean Z1*mu2 + mu1, covariance (Z1 Z2)(Z1 Z2)^T.
GaussianModel group_product(const GaussianModel& g1, const GaussianModel& g2);

// exp(log A1 + log A2): commutative by construction.
AffinePlus logeuclid_product(const AffinePlus& A1, const AffinePlus& A2);
// exp(lambda log A).
AffinePlus logeuclid_scale(double lambda, const AffinePlus& A);

}  // namespace ticp
