#include "ticp/lie.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ticp {

namespace {

constexpr double kSeriesTol = 1e-16;
constexpr int kSeriesCap = 200;
constexpr double kScaleThreshold = 0.25;
constexpr int kMaxRoots = 64;

void require_positive_diagonal(const UpperTri3& U, const char* who) {
    if (!(U.a00 > 0.0) || !(U.a11 > 0.0) || !(U.a22 > 0.0))
        throw std::domain_error(std::string(who) + ": diagonal must be strictly positive");
}

// Alternating Mercator series log(I + X), valid for small X.
UpperTri3 log_series(const UpperTri3& X) {
    UpperTri3 acc{};
    UpperTri3 term = X;
    double sign = 1.0;
    for (int n = 1; n <= kSeriesCap; ++n) {
        UpperTri3 contrib = term * (sign / n);
        acc = acc + contrib;
        if (contrib.frobenius_norm() < kSeriesTol) break;
        term = term * X;
        sign = -sign;
    }
    return acc;
}

// sum_{n>=0} (-1)^n X^n / (n+1), valid for small X.
UpperTri3 phi_series(const UpperTri3& X) {
    UpperTri3 acc = UpperTri3::identity();
    UpperTri3 term = UpperTri3::identity();
    double sign = 1.0;
    for (int n = 1; n <= kSeriesCap; ++n) {
        term = term * X;
        sign = -sign;
        UpperTri3 contrib = term * (sign / (n + 1));
        acc = acc + contrib;
        if (contrib.frobenius_norm() < kSeriesTol) break;
    }
    return acc;
}

// exp via Taylor series, valid for small X.
UpperTri3 exp_series(const UpperTri3& X) {
    UpperTri3 acc = UpperTri3::identity();
    UpperTri3 term = UpperTri3::identity();
    for (int n = 1; n <= kSeriesCap; ++n) {
        term = term * X * (1.0 / n);
        acc = acc + term;
        if (term.frobenius_norm() < kSeriesTol) break;
    }
    return acc;
}

// Psi(X) = sum_{n>=0} X^n / (n+1)!, so that exp([[X,v],[0,0]]) has upper
// block Psi(X) v.
UpperTri3 psi_series(const UpperTri3& X) {
    UpperTri3 acc = UpperTri3::identity();
    UpperTri3 term = UpperTri3::identity();
    for (int n = 1; n <= kSeriesCap; ++n) {
        term = term * X * (1.0 / (n + 1));
        acc = acc + term;
        if (term.frobenius_norm() < kSeriesTol) break;
    }
    return acc;
}

}  // namespace

UpperTri3 ut_inverse(const UpperTri3& U) {
    if (U.a00 == 0.0 || U.a11 == 0.0 || U.a22 == 0.0)
        throw std::domain_error("ut_inverse: singular triangular matrix");
    UpperTri3 B;
    B.a00 = 1.0 / U.a00;
    B.a11 = 1.0 / U.a11;
    B.a22 = 1.0 / U.a22;
    B.a01 = -U.a01 / (U.a00 * U.a11);
    B.a12 = -U.a12 / (U.a11 * U.a22);
    B.a02 = (U.a01 * U.a12 - U.a02 * U.a11) / (U.a00 * U.a11 * U.a22);
    return B;
}

UpperTri3 ut_sqrt(const UpperTri3& U) {
    require_positive_diagonal(U, "ut_sqrt");
    UpperTri3 S;
    S.a00 = std::sqrt(U.a00);
    S.a11 = std::sqrt(U.a11);
    S.a22 = std::sqrt(U.a22);
    S.a01 = U.a01 / (S.a00 + S.a11);
    S.a12 = U.a12 / (S.a11 + S.a22);
    S.a02 = (U.a02 - S.a01 * S.a12) / (S.a00 + S.a22);
    return S;
}

SymTensor3 regularize(const SymTensor3& S, double eps_rel) {
    if (!(eps_rel > 0.0)) throw std::invalid_argument("regularize: eps_rel must be positive");
    double eps = eps_rel * std::max(S.trace(), 1.0);
    SymTensor3 out = S;
    out.xx += eps;
    out.yy += eps;
    out.zz += eps;
    return out;
}

UpperTri3 cholesky_inverse_factor(const SymTensor3& Sigma) {
    // invert the symmetric 3x3 by adjugate
    double a = Sigma.xx, b = Sigma.xy, c = Sigma.xz;
    double d = Sigma.yy, e = Sigma.yz, f = Sigma.zz;
    double det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
    if (!(det > 0.0))
        throw std::domain_error("cholesky_inverse_factor: matrix is not positive definite");
    double i00 = (d * f - e * e) / det;
    double i01 = (c * e - b * f) / det;
    double i02 = (b * e - c * d) / det;
    double i11 = (a * f - c * c) / det;
    double i12 = (b * c - a * e) / det;
    double i22 = (a * d - b * b) / det;

    // lower Cholesky of the inverse: Sigma^{-1} = L L^T
    if (!(i00 > 0.0))
        throw std::domain_error("cholesky_inverse_factor: matrix is not positive definite");
    double l00 = std::sqrt(i00);
    double l10 = i01 / l00;
    double l20 = i02 / l00;
    double p11 = i11 - l10 * l10;
    if (!(p11 > 0.0))
        throw std::domain_error("cholesky_inverse_factor: matrix is not positive definite");
    double l11 = std::sqrt(p11);
    double l21 = (i12 - l20 * l10) / l11;
    double p22 = i22 - l20 * l20 - l21 * l21;
    if (!(p22 > 0.0))
        throw std::domain_error("cholesky_inverse_factor: matrix is not positive definite");
    double l22 = std::sqrt(p22);

    // L^{-1} by forward substitution, then transpose into an upper matrix
    double m00 = 1.0 / l00;
    double m11 = 1.0 / l11;
    double m22 = 1.0 / l22;
    double m10 = -l10 * m00 / l11;
    double m21 = -l21 * m11 / l22;
    double m20 = (l10 * l21 / l11 - l20) * m00 / l22;

    UpperTri3 Z;
    Z.a00 = m00;
    Z.a01 = m10;
    Z.a02 = m20;
    Z.a11 = m11;
    Z.a12 = m21;
    Z.a22 = m22;
    return Z;
}

AffinePlus embed(const GaussianModel& g) {
    return AffinePlus{cholesky_inverse_factor(g.sigma_mat), g.mu};
}

UpperTri3 log_pdut(const UpperTri3& U) {
    require_positive_diagonal(U, "log_pdut");
    UpperTri3 W = U;
    int k = 0;
    while (W.deviation_from_identity() >= kScaleThreshold && k < kMaxRoots) {
        W = ut_sqrt(W);
        ++k;
    }
    UpperTri3 L = log_series(W - UpperTri3::identity());
    return L * std::ldexp(1.0, k);
}

UpperTri3 phi_factor(const UpperTri3& C) {
    UpperTri3 U = C + UpperTri3::identity();
    require_positive_diagonal(U, "phi_factor");
    // Phi(U - I) = 2 Phi(W - I) (W + I)^{-1} with W = sqrt(U); all factors
    // are rational in U so they commute and the order below is safe.
    UpperTri3 post = UpperTri3::identity();
    int k = 0;
    while (U.deviation_from_identity() >= kScaleThreshold && k < kMaxRoots) {
        UpperTri3 W = ut_sqrt(U);
        post = ut_inverse(W + UpperTri3::identity()) * post;
        U = W;
        ++k;
    }
    return phi_series(U - UpperTri3::identity()) * post * std::ldexp(1.0, k);
}

LogEmbedding log_embedding(const AffinePlus& A) {
    LogEmbedding L;
    L.T11 = log_pdut(A.Z);
    L.T12 = phi_factor(A.Z - UpperTri3::identity()) * A.mu;
    return L;
}

AffinePlus exp_affine(const LogEmbedding& L) {
    int s = 0;
    double norm = L.T11.frobenius_norm() + L.T12.norm();
    while (std::ldexp(norm, -s) >= 0.5 && s < kMaxRoots) ++s;
    double scale = std::ldexp(1.0, -s);

    UpperTri3 X = L.T11 * scale;
    Vec3 v = L.T12 * scale;
    UpperTri3 E = exp_series(X);
    Vec3 p = psi_series(X) * v;
    for (int i = 0; i < s; ++i) {
        p = E * p + p;
        E = E * E;
    }
    return AffinePlus{E, p};
}

GaussianModel group_product(const GaussianModel& g1, const GaussianModel& g2) {
    UpperTri3 Z1 = cholesky_inverse_factor(g1.sigma_mat);
    UpperTri3 Z2 = cholesky_inverse_factor(g2.sigma_mat);
    UpperTri3 Z12 = Z1 * Z2;

    GaussianModel out;
    out.mu = Z1 * g2.mu + g1.mu;
    // Sigma = Z Z^T for Z = L^{-T}
    out.sigma_mat.xx = Z12.a00 * Z12.a00 + Z12.a01 * Z12.a01 + Z12.a02 * Z12.a02;
    out.sigma_mat.xy = Z12.a01 * Z12.a11 + Z12.a02 * Z12.a12;
    out.sigma_mat.xz = Z12.a02 * Z12.a22;
    out.sigma_mat.yy = Z12.a11 * Z12.a11 + Z12.a12 * Z12.a12;
    out.sigma_mat.yz = Z12.a12 * Z12.a22;
    out.sigma_mat.zz = Z12.a22 * Z12.a22;
    return out;
}

AffinePlus logeuclid_product(const AffinePlus& A1, const AffinePlus& A2) {
    LogEmbedding L1 = log_embedding(A1);
    LogEmbedding L2 = log_embedding(A2);
    return exp_affine(LogEmbedding{L1.T11 + L2.T11, L1.T12 + L2.T12});
}

AffinePlus logeuclid_scale(double lambda, const AffinePlus& A) {
    LogEmbedding L = log_embedding(A);
    return exp_affine(LogEmbedding{L.T11 * lambda, L.T12 * lambda});
}

}  // namespace ticp
