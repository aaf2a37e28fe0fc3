#include <array>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracle4.hpp"
#include "support.hpp"
#include "ticp/core.hpp"
#include "ticp/lie.hpp"
#include "ticp/voting.hpp"

using namespace ticp;
using testsupport::M4;
using testsupport::exp4;
using testsupport::log4;
using testsupport::random_vec;

namespace {

M4 to_m4(const AffinePlus& A) {
    M4 r;
    r(0, 0) = A.Z.a00; r(0, 1) = A.Z.a01; r(0, 2) = A.Z.a02; r(0, 3) = A.mu.x;
    r(1, 1) = A.Z.a11; r(1, 2) = A.Z.a12; r(1, 3) = A.mu.y;
    r(2, 2) = A.Z.a22; r(2, 3) = A.mu.z;
    r(3, 3) = 1.0;
    return r;
}

M4 to_m4(const LogEmbedding& L) {
    M4 r;
    r(0, 0) = L.T11.a00; r(0, 1) = L.T11.a01; r(0, 2) = L.T11.a02; r(0, 3) = L.T12.x;
    r(1, 1) = L.T11.a11; r(1, 2) = L.T11.a12; r(1, 3) = L.T12.y;
    r(2, 2) = L.T11.a22; r(2, 3) = L.T12.z;
    // bottom row all zero
    return r;
}

double ut_diff(const UpperTri3& A, const UpperTri3& B) { return (A - B).frobenius_norm(); }

UpperTri3 random_pdut(SplitMix64& gen, double offdiag_scale = 1.0) {
    auto d = [&] { return std::exp(std::log(0.1) + gen.next_double() * std::log(100.0)); };
    UpperTri3 U;
    U.a00 = d();
    U.a11 = d();
    U.a22 = d();
    U.a01 = offdiag_scale * 2.0 * (gen.next_double() - 0.5);
    U.a02 = offdiag_scale * 2.0 * (gen.next_double() - 0.5);
    U.a12 = offdiag_scale * 2.0 * (gen.next_double() - 0.5);
    return U;
}

SymTensor3 random_pd_tensor(SplitMix64& gen) {
    // B B^T + small ridge, guaranteed PD
    Mat3 B;
    for (int i = 0; i < 9; ++i) B.m[static_cast<size_t>(i)] = 2.0 * (gen.next_double() - 0.5);
    Mat3 S = B * B.transposed();
    SymTensor3 t;
    t.xx = S(0, 0) + 0.05;
    t.xy = S(0, 1);
    t.xz = S(0, 2);
    t.yy = S(1, 1) + 0.05;
    t.yz = S(1, 2);
    t.zz = S(2, 2) + 0.05;
    return t;
}

}  // namespace

TEST_CASE("ut_inverse closed form") {
    SplitMix64 gen(41);
    for (int trial = 0; trial < 25; ++trial) {
        UpperTri3 U = random_pdut(gen);
        UpperTri3 inv = ut_inverse(U);
        CHECK(ut_diff(U * inv, UpperTri3::identity()) < 1e-12);
        CHECK(ut_diff(inv * U, UpperTri3::identity()) < 1e-12);
    }
    UpperTri3 singular = UpperTri3::identity();
    singular.a11 = 0.0;
    CHECK_THROWS_AS(ut_inverse(singular), std::domain_error);
}

TEST_CASE("ut_sqrt squares back to the input") {
    SplitMix64 gen(42);
    for (int trial = 0; trial < 25; ++trial) {
        UpperTri3 U = random_pdut(gen);
        UpperTri3 S = ut_sqrt(U);
        CHECK(S.a00 > 0.0);
        CHECK(S.a11 > 0.0);
        CHECK(S.a22 > 0.0);
        CHECK(ut_diff(S * S, U) < 1e-12 * std::max(1.0, U.frobenius_norm()));
    }
    UpperTri3 neg = UpperTri3::identity();
    neg.a00 = -2.0;
    CHECK_THROWS_AS(ut_sqrt(neg), std::domain_error);
}

TEST_CASE("regularize shifts the spectrum by exactly eps") {
    SymTensor3 zero;
    SymTensor3 rz = regularize(zero, 1e-6);
    CHECK(rz.xx == doctest::Approx(1e-6));
    CHECK(rz.yy == doctest::Approx(1e-6));
    CHECK(rz.zz == doctest::Approx(1e-6));
    CHECK(rz.xy == 0.0);

    SplitMix64 gen(43);
    SymTensor3 pd = random_pd_tensor(gen);
    double eps = 1e-6 * std::max(pd.trace(), 1.0);
    EigenFrame before = eigen_frame(pd);
    EigenFrame after = eigen_frame(regularize(pd, 1e-6));
    CHECK(after.lambda3 - before.lambda3 == doctest::Approx(eps).epsilon(1e-6));

    CHECK_THROWS_AS(regularize(pd, 0.0), std::invalid_argument);
}

TEST_CASE("regularized planar tensor admits the factorization") {
    // rank-2 tensor: votes spanning only the xy-plane
    SymTensor3 planar;
    planar.add_outer({1, 0, 0}, 1.0);
    planar.add_outer({0.6, 0.8, 0}, 0.7);
    CHECK_THROWS_AS(cholesky_inverse_factor(planar), std::domain_error);
    UpperTri3 Z = cholesky_inverse_factor(regularize(planar, 1e-6));
    CHECK(Z.a00 > 0.0);
    CHECK(Z.a11 > 0.0);
    CHECK(Z.a22 > 0.0);
}

TEST_CASE("cholesky_inverse_factor on identity and diagonal") {
    UpperTri3 zi = cholesky_inverse_factor(SymTensor3::from_diag(1, 1, 1));
    CHECK(ut_diff(zi, UpperTri3::identity()) < 1e-14);

    UpperTri3 zd = cholesky_inverse_factor(SymTensor3::from_diag(4, 1, 1));
    CHECK(zd.a00 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(zd.a11 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(zd.a22 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(zd.a01) + std::fabs(zd.a02) + std::fabs(zd.a12) < 1e-14);
}

TEST_CASE("cholesky_inverse_factor satisfies Z Z^T = Sigma") {
    SplitMix64 gen(44);
    for (int trial = 0; trial < 25; ++trial) {
        SymTensor3 Sigma = random_pd_tensor(gen);
        UpperTri3 Z = cholesky_inverse_factor(Sigma);
        Mat3 ZZt = Z.to_mat3() * Z.to_mat3().transposed();
        CHECK((ZZt - Sigma.to_mat3()).frobenius_norm() <
              1e-10 * std::max(1.0, Sigma.to_mat3().frobenius_norm()));
        CHECK(Z.a00 > 0.0);
        CHECK(Z.a11 > 0.0);
        CHECK(Z.a22 > 0.0);
    }
    CHECK_THROWS_AS(cholesky_inverse_factor(SymTensor3::from_diag(1, -1, 1)), std::domain_error);
}

TEST_CASE("embed carries mean and factor") {
    GaussianModel std3{{0, 0, 0}, SymTensor3::from_diag(1, 1, 1)};
    AffinePlus A = embed(std3);
    CHECK(ut_diff(A.Z, UpperTri3::identity()) < 1e-14);
    CHECK(A.mu.norm() == 0.0);

    GaussianModel shifted{{1, 2, 3}, SymTensor3::from_diag(1, 1, 1)};
    AffinePlus B = embed(shifted);
    CHECK((B.mu - Vec3{1, 2, 3}).norm() == 0.0);

    SplitMix64 gen(45);
    GaussianModel g{random_vec(gen, 2.0), random_pd_tensor(gen)};
    AffinePlus C = embed(g);
    Mat3 back = C.Z.to_mat3() * C.Z.to_mat3().transposed();
    CHECK((back - g.sigma_mat.to_mat3()).frobenius_norm() < 1e-10 * std::max(1.0, back.frobenius_norm()));
}

TEST_CASE("log_pdut anchors") {
    CHECK(log_pdut(UpperTri3::identity()).frobenius_norm() < 1e-15);

    double e = std::exp(1.0);
    UpperTri3 U{e, 0, 0, e, 0, e};
    UpperTri3 L = log_pdut(U);
    CHECK(L.a00 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(L.a11 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(L.a22 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::fabs(L.a01) + std::fabs(L.a02) + std::fabs(L.a12) < 1e-13);

    UpperTri3 bad = UpperTri3::identity();
    bad.a22 = 0.0;
    CHECK_THROWS_AS(log_pdut(bad), std::domain_error);
}

TEST_CASE("exp(log(U)) = U against the series exponential") {
    SplitMix64 gen(46);
    for (int trial = 0; trial < 30; ++trial) {
        UpperTri3 U = random_pdut(gen);
        UpperTri3 L = log_pdut(U);
        // oracle: dense 4x4 series exponential of the embedded triangular log
        M4 X;
        X(0, 0) = L.a00; X(0, 1) = L.a01; X(0, 2) = L.a02;
        X(1, 1) = L.a11; X(1, 2) = L.a12;
        X(2, 2) = L.a22;
        M4 E = exp4(X);
        UpperTri3 back{E(0, 0), E(0, 1), E(0, 2), E(1, 1), E(1, 2), E(2, 2)};
        CHECK(ut_diff(back, U) < 1e-10 * std::max(1.0, U.frobenius_norm()));
    }
}

TEST_CASE("phi_factor anchors") {
    CHECK(ut_diff(phi_factor(UpperTri3{}), UpperTri3::identity()) < 1e-15);

    UpperTri3 C{0.5, 0, 0, 0.5, 0, 0.5};
    UpperTri3 P = phi_factor(C);
    double expect = std::log(1.5) / 0.5;
    CHECK(P.a00 == doctest::Approx(expect).epsilon(1e-13));
    CHECK(P.a00 == doctest::Approx(0.81093).epsilon(1e-4));
    CHECK(P.a11 == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("phi_factor equals explicit inverse times log when C is invertible") {
    SplitMix64 gen(47);
    int done = 0;
    while (done < 25) {
        UpperTri3 U = random_pdut(gen);
        UpperTri3 C = U - UpperTri3::identity();
        if (std::fabs(C.a00) < 0.05 || std::fabs(C.a11) < 0.05 || std::fabs(C.a22) < 0.05)
            continue;  // keep the explicit inverse well conditioned
        // independent inverse by back substitution on the 3x3
        Mat3 Cm = C.to_mat3();
        Mat3 inv = Mat3::zero();
        inv(2, 2) = 1.0 / Cm(2, 2);
        inv(1, 1) = 1.0 / Cm(1, 1);
        inv(0, 0) = 1.0 / Cm(0, 0);
        inv(1, 2) = -Cm(1, 2) * inv(2, 2) / Cm(1, 1);
        inv(0, 1) = -Cm(0, 1) * inv(1, 1) / Cm(0, 0);
        inv(0, 2) = -(Cm(0, 1) * inv(1, 2) + Cm(0, 2) * inv(2, 2)) / Cm(0, 0);
        Mat3 expect = inv * log_pdut(U).to_mat3();
        Mat3 got = phi_factor(C).to_mat3();
        CHECK((got - expect).frobenius_norm() < 1e-10 * std::max(1.0, expect.frobenius_norm()));
        ++done;
    }
}

TEST_CASE("log_embedding anchors") {
    LogEmbedding trivial = log_embedding({UpperTri3::identity(), {5, -2, 0.5}});
    CHECK(trivial.T11.frobenius_norm() < 1e-14);
    CHECK((trivial.T12 - Vec3{5, -2, 0.5}).norm() < 1e-13);

    UpperTri3 Z{2, 0, 0, 1, 0, 1};
    LogEmbedding scalar = log_embedding({Z, {1, 0, 0}});
    CHECK(scalar.T11.a00 == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(std::fabs(scalar.T11.a11) < 1e-14);
    CHECK(scalar.T12.x == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(std::fabs(scalar.T12.y) < 1e-13);
    CHECK(std::fabs(scalar.T12.z) < 1e-13);
}

TEST_CASE("log_embedding matches the dense 4x4 series log") {
    SplitMix64 gen(48);
    for (int trial = 0; trial < 20; ++trial) {
        AffinePlus A{random_pdut(gen), random_vec(gen, 3.0)};
        LogEmbedding L = log_embedding(A);
        M4 oracle = log4(to_m4(A));
        // the dense log of the block matrix has an exactly-zero bottom row
        for (int c = 0; c < 4; ++c) CHECK(std::fabs(oracle(3, c)) < 1e-12);
        CHECK((to_m4(L) - oracle).fro() < 1e-9 * std::max(1.0, oracle.fro()));
    }
}

TEST_CASE("exp_affine inverts log_embedding") {
    SplitMix64 gen(49);
    for (int trial = 0; trial < 30; ++trial) {
        AffinePlus A{random_pdut(gen), random_vec(gen, 3.0)};
        AffinePlus back = exp_affine(log_embedding(A));
        CHECK(ut_diff(back.Z, A.Z) < 1e-9 * std::max(1.0, A.Z.frobenius_norm()));
        CHECK((back.mu - A.mu).norm() < 1e-9 * std::max(1.0, A.mu.norm()));
        // and against the dense oracle exponential
        M4 dense = exp4(to_m4(log_embedding(A)));
        CHECK((dense - to_m4(A)).fro() < 1e-9 * std::max(1.0, to_m4(A).fro()));
    }
}

TEST_CASE("group product: unit element and isomorphism") {
    SplitMix64 gen(50);
    GaussianModel unit{{0, 0, 0}, SymTensor3::from_diag(1, 1, 1)};
    GaussianModel g1{random_vec(gen, 2.0), random_pd_tensor(gen)};

    GaussianModel right = group_product(g1, unit);
    CHECK((right.mu - g1.mu).norm() < 1e-12);
    CHECK((right.sigma_mat.to_mat3() - g1.sigma_mat.to_mat3()).frobenius_norm() < 1e-10);

    GaussianModel both = group_product(unit, unit);
    CHECK(both.mu.norm() < 1e-14);
    CHECK((both.sigma_mat.to_mat3() - Mat3::identity()).frobenius_norm() < 1e-12);

    for (int trial = 0; trial < 25; ++trial) {
        GaussianModel a{random_vec(gen, 2.0), random_pd_tensor(gen)};
        GaussianModel b{random_vec(gen, 2.0), random_pd_tensor(gen)};
        M4 lhs = to_m4(embed(group_product(a, b)));
        M4 rhs = to_m4(embed(a)) * to_m4(embed(b));
        CHECK((lhs - rhs).fro() < 1e-10 * std::max(1.0, rhs.fro()));
    }
}

TEST_CASE("group product is associative") {
    SplitMix64 gen(51);
    for (int trial = 0; trial < 15; ++trial) {
        GaussianModel a{random_vec(gen, 1.0), random_pd_tensor(gen)};
        GaussianModel b{random_vec(gen, 1.0), random_pd_tensor(gen)};
        GaussianModel c{random_vec(gen, 1.0), random_pd_tensor(gen)};
        GaussianModel l = group_product(group_product(a, b), c);
        GaussianModel r = group_product(a, group_product(b, c));
        CHECK((l.mu - r.mu).norm() < 1e-10);
        CHECK((l.sigma_mat.to_mat3() - r.sigma_mat.to_mat3()).frobenius_norm() < 1e-10);
    }
}

TEST_CASE("log-Euclidean product: identity, commutativity, scalar power") {
    SplitMix64 gen(52);
    AffinePlus id{UpperTri3::identity(), {0, 0, 0}};
    for (int trial = 0; trial < 15; ++trial) {
        AffinePlus A{random_pdut(gen, 0.5), random_vec(gen, 2.0)};
        AffinePlus B{random_pdut(gen, 0.5), random_vec(gen, 2.0)};

        AffinePlus ai = logeuclid_product(A, id);
        CHECK(ut_diff(ai.Z, A.Z) < 1e-10 * std::max(1.0, A.Z.frobenius_norm()));
        CHECK((ai.mu - A.mu).norm() < 1e-9 * std::max(1.0, A.mu.norm()));

        AffinePlus ab = logeuclid_product(A, B);
        AffinePlus ba = logeuclid_product(B, A);
        CHECK(ut_diff(ab.Z, ba.Z) < 1e-10 * std::max(1.0, ab.Z.frobenius_norm()));
        CHECK((ab.mu - ba.mu).norm() < 1e-9 * std::max(1.0, ab.mu.norm()));

        AffinePlus doubled = logeuclid_scale(2.0, A);
        M4 square = to_m4(A) * to_m4(A);
        CHECK((to_m4(doubled) - square).fro() < 1e-10 * std::max(1.0, square.fro()));
    }
}

TEST_CASE("log-Euclidean product is associative") {
    SplitMix64 gen(53);
    for (int trial = 0; trial < 10; ++trial) {
        AffinePlus A{random_pdut(gen, 0.5), random_vec(gen, 1.0)};
        AffinePlus B{random_pdut(gen, 0.5), random_vec(gen, 1.0)};
        AffinePlus C{random_pdut(gen, 0.5), random_vec(gen, 1.0)};
        AffinePlus l = logeuclid_product(logeuclid_product(A, B), C);
        AffinePlus r = logeuclid_product(A, logeuclid_product(B, C));
        CHECK(ut_diff(l.Z, r.Z) < 1e-10 * std::max(1.0, l.Z.frobenius_norm()));
        CHECK((l.mu - r.mu).norm() < 1e-9 * std::max(1.0, l.mu.norm()));
    }
}

TEST_CASE("triangular log coordinates are not rotation invariant") {
    SymTensor3 Sigma = regularize(SymTensor3::from_diag(4, 1, 1), 1e-6);
    Mat3 R = rotation_about_axis({0, 0, 1}, deg_to_rad(45.0));
    Mat3 rot = R * Sigma.to_mat3() * R.transposed();
    SymTensor3 Sr;
    Sr.xx = rot(0, 0);
    Sr.xy = rot(0, 1);
    Sr.xz = rot(0, 2);
    Sr.yy = rot(1, 1);
    Sr.yz = rot(1, 2);
    Sr.zz = rot(2, 2);
    UpperTri3 t_orig = log_pdut(cholesky_inverse_factor(Sigma));
    UpperTri3 t_rot = log_pdut(cholesky_inverse_factor(Sr));
    CHECK((t_orig - t_rot).frobenius_norm() > 1e-3);
}
