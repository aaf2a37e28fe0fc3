#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracle4.hpp"
#include "support.hpp"
#include "ticp/core.hpp"
#include "ticp/lie.hpp"
#include "ticp/similarity.hpp"
#include "ticp/voting.hpp"

using namespace ticp;
using testsupport::M4;
using testsupport::log4;
using testsupport::make_patch;
using testsupport::random_rotation;
using testsupport::random_vec;

namespace {

ShapeDescriptor fabricate(const Point3& p, const UpperTri3& Z,
                          std::array<double, 3> eigenvalues = {0, 0, 0}) {
    ShapeDescriptor d;
    d.point = p;
    d.eigenvalues = eigenvalues;
    d.embedding = log_embedding({Z, p});
    d.phi = phi_factor(Z - UpperTri3::identity());
    return d;
}

UpperTri3 random_pdut(SplitMix64& gen) {
    auto dd = [&] { return std::exp(std::log(0.2) + gen.next_double() * std::log(25.0)); };
    UpperTri3 U;
    U.a00 = dd();
    U.a11 = dd();
    U.a22 = dd();
    U.a01 = gen.next_double() - 0.5;
    U.a02 = gen.next_double() - 0.5;
    U.a12 = gen.next_double() - 0.5;
    return U;
}

M4 affine_m4(const UpperTri3& Z, const Vec3& mu) {
    M4 r;
    r(0, 0) = Z.a00; r(0, 1) = Z.a01; r(0, 2) = Z.a02; r(0, 3) = mu.x;
    r(1, 1) = Z.a11; r(1, 2) = Z.a12; r(1, 3) = mu.y;
    r(2, 2) = Z.a22; r(2, 3) = mu.z;
    r(3, 3) = 1.0;
    return r;
}

}  // namespace

TEST_CASE("weight schedule decays geometrically and hits exact zero") {
    WeightSchedule w{10.0, 0.5, 0, 1e-8};
    CHECK(w.current() == doctest::Approx(10.0));
    w.m = 2;
    CHECK(w.current() == doctest::Approx(2.5));
    w.m = 60;  // 10 * 0.5^60 is far below the cutoff
    CHECK(w.current() == 0.0);
    WeightSchedule zero{0.0, 0.5, 0, 1e-8};
    CHECK(zero.current() == 0.0);
}

TEST_CASE("ctsf hand values and symmetry") {
    ShapeDescriptor a = fabricate({0, 0, 0}, UpperTri3::identity(), {3, 2, 1});
    ShapeDescriptor b = fabricate({0, 0, 0}, UpperTri3::identity(), {1, 1, 1});
    CHECK(ctsf(a, a) == 0.0);
    CHECK(ctsf(a, b) == doctest::Approx(5.0));
    CHECK(ctsf(a, b) == ctsf(b, a));
}

TEST_CASE("ctsf is invariant under rigid motion of the cloud") {
    SplitMix64 gen(61);
    PointCloud c = make_patch(10, 1.0);
    RigidTransform T = make_rigid(random_rotation(gen), random_vec(gen, 1.0));
    PointCloud moved = apply_transform(c, T);
    TensorField fa = tensor_field(c, 12.0);
    TensorField fb = tensor_field(moved, 12.0);
    auto da = build_descriptors(c, fa.anisotropic);
    auto db = build_descriptors(moved, fb.anisotropic);
    for (size_t i = 0; i < c.size(); ++i) CHECK(ctsf(da[i], db[i]) < 1e-6);
}

TEST_CASE("d_cm reduces to Euclidean distance when the weight is zero") {
    SplitMix64 gen(62);
    ShapeDescriptor a = fabricate(random_vec(gen, 1.0), random_pdut(gen), {5, 1, 0.1});
    ShapeDescriptor b = fabricate(random_vec(gen, 1.0), random_pdut(gen), {2, 2, 2});
    WeightSchedule off{0.0, 0.5, 0, 1e-8};
    CHECK(d_cm(a.point, b.point, a, b, off) == doctest::Approx((a.point - b.point).norm()));

    // identical shapes: the shape term vanishes for any weight
    ShapeDescriptor b2 = b;
    b2.eigenvalues = a.eigenvalues;
    WeightSchedule heavy{1e6, 0.5, 0, 1e-8};
    CHECK(d_cm(a.point, b2.point, a, b2, heavy) ==
          doctest::Approx((a.point - b2.point).norm()));

    WeightSchedule sched{10.0, 0.5, 2, 1e-8};  // w_m = 2.5
    double expect = (a.point - b.point).norm() + 2.5 * ctsf(a, b);
    CHECK(d_cm(a.point, b.point, a, b, sched) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("lie_difference: zero case and identity-factor case") {
    SplitMix64 gen(63);
    ShapeDescriptor a = fabricate(random_vec(gen, 2.0), random_pdut(gen));
    LieDifference zero = lie_difference(a, a);
    CHECK(zero.D11.frobenius_norm() == 0.0);
    CHECK(zero.D12.norm() == 0.0);

    Vec3 p = {1.5, -0.25, 2};
    Vec3 q = {0.75, 1.0, -1};
    ShapeDescriptor dp = fabricate(p, UpperTri3::identity());
    ShapeDescriptor dq = fabricate(q, UpperTri3::identity());
    LieDifference d = lie_difference(dp, dq);
    CHECK(d.D11.frobenius_norm() < 1e-14);
    CHECK((d.D12 - (p - q)).norm() < 1e-12);
}

TEST_CASE("lie_difference equals subtraction of dense 4x4 logs") {
    SplitMix64 gen(64);
    for (int trial = 0; trial < 15; ++trial) {
        UpperTri3 Za = random_pdut(gen);
        UpperTri3 Zb = random_pdut(gen);
        Vec3 pa = random_vec(gen, 2.0);
        Vec3 pb = random_vec(gen, 2.0);
        ShapeDescriptor da = fabricate(pa, Za);
        ShapeDescriptor db = fabricate(pb, Zb);
        LieDifference d = lie_difference(da, db);

        M4 diff = log4(affine_m4(Za, pa)) - log4(affine_m4(Zb, pb));
        CHECK(std::fabs(d.D11.a00 - diff(0, 0)) < 1e-9);
        CHECK(std::fabs(d.D11.a01 - diff(0, 1)) < 1e-9);
        CHECK(std::fabs(d.D11.a02 - diff(0, 2)) < 1e-9);
        CHECK(std::fabs(d.D11.a11 - diff(1, 1)) < 1e-9);
        CHECK(std::fabs(d.D11.a12 - diff(1, 2)) < 1e-9);
        CHECK(std::fabs(d.D11.a22 - diff(2, 2)) < 1e-9);
        CHECK(std::fabs(d.D12.x - diff(0, 3)) < 1e-9);
        CHECK(std::fabs(d.D12.y - diff(1, 3)) < 1e-9);
        CHECK(std::fabs(d.D12.z - diff(2, 3)) < 1e-9);
    }
}

TEST_CASE("frob_score hand value, symmetry, and naive oracle") {
    ShapeDescriptor dp = fabricate({3, 4, 0}, UpperTri3::identity());
    ShapeDescriptor dq = fabricate({0, 0, 0}, UpperTri3::identity());
    CHECK(frob_score(dp, dp) == 0.0);
    CHECK(frob_score(dp, dq) == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(frob_score(dp, dq) == frob_score(dq, dp));

    SplitMix64 gen(65);
    for (int trial = 0; trial < 15; ++trial) {
        ShapeDescriptor a = fabricate(random_vec(gen, 2.0), random_pdut(gen));
        ShapeDescriptor b = fabricate(random_vec(gen, 2.0), random_pdut(gen));
        LieDifference d = lie_difference(a, b);
        double naive = d.D11.a00 * d.D11.a00 + d.D11.a01 * d.D11.a01 + d.D11.a02 * d.D11.a02 +
                       d.D11.a11 * d.D11.a11 + d.D11.a12 * d.D11.a12 + d.D11.a22 * d.D11.a22 +
                       d.D12.x * d.D12.x + d.D12.y * d.D12.y + d.D12.z * d.D12.z;
        CHECK(std::fabs(frob_score(a, b) - naive) < 1e-12 * std::max(1.0, naive));
    }
}

TEST_CASE("weighted_frob_score blends the blocks") {
    SplitMix64 gen(66);
    ShapeDescriptor a = fabricate(random_vec(gen, 2.0), random_pdut(gen));
    ShapeDescriptor b = fabricate(random_vec(gen, 2.0), random_pdut(gen));
    LieDifference d = lie_difference(a, b);
    double d11 = d.D11.frobenius_norm() * d.D11.frobenius_norm();
    double d12 = d.D12.squared_norm();

    WeightSchedule one{1.0, 0.5, 0, 1e-8};
    CHECK(weighted_frob_score(a, b, one) == doctest::Approx(frob_score(a, b)).epsilon(1e-13));

    WeightSchedule zero{0.0, 0.5, 0, 1e-8};
    CHECK(weighted_frob_score(a, b, zero) == doctest::Approx(d12).epsilon(1e-13));

    WeightSchedule part{10.0, 0.5, 2, 1e-8};  // 2.5
    CHECK(weighted_frob_score(a, b, part) == doctest::Approx(2.5 * d11 + d12).epsilon(1e-13));
}

TEST_CASE("frobenius scores are not rotation invariant: fixed witness") {
    // Same covariance shape, same location, different orientation.
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

    Point3 p{0, 0, 0};  // fixed point isolates the shape block
    ShapeDescriptor da = fabricate(p, cholesky_inverse_factor(Sigma));
    ShapeDescriptor db = fabricate(p, cholesky_inverse_factor(Sr));
    CHECK(frob_score(da, db) > 1e-3);
}

TEST_CASE("build_descriptors wires the field through the embedding") {
    PointCloud c = make_patch(8, 1.0);
    TensorField f = tensor_field(c, 15.0);
    auto ds = build_descriptors(c, f.anisotropic);
    REQUIRE(ds.size() == c.size());
    for (size_t i = 0; i < ds.size(); ++i) {
        CHECK((ds[i].point - c.points[i]).norm() == 0.0);
        CHECK(ds[i].eigenvalues[0] >= ds[i].eigenvalues[1]);
        CHECK(ds[i].eigenvalues[1] >= ds[i].eigenvalues[2]);
        // T12 must equal the cached linear factor applied to the point
        Vec3 expect = ds[i].phi * ds[i].point;
        CHECK((ds[i].embedding.T12 - expect).norm() < 1e-12);
        CHECK(std::isfinite(ds[i].embedding.T11.frobenius_norm()));
    }

    std::vector<SymTensor3> wrong(c.size() - 1);
    CHECK_THROWS_AS(build_descriptors(c, wrong), std::invalid_argument);
}

TEST_CASE("moved_descriptor refreshes only the position-dependent parts") {
    PointCloud c = make_patch(8, 1.0);
    TensorField f = tensor_field(c, 15.0);
    auto ds = build_descriptors(c, f.anisotropic);
    Point3 np{9.0, -3.0, 2.0};
    ShapeDescriptor md = moved_descriptor(ds[5], np);
    CHECK((md.point - np).norm() == 0.0);
    CHECK((md.embedding.T11 - ds[5].embedding.T11).frobenius_norm() == 0.0);
    CHECK(md.eigenvalues == ds[5].eigenvalues);
    CHECK((md.embedding.T12 - md.phi * np).norm() < 1e-12);
}

TEST_CASE("calibrate_w0 is deterministic and scales inversely with ctsf") {
    PointCloud c = make_patch(9, 1.0);
    TensorField f = tensor_field(c, 15.0);
    auto ds = build_descriptors(c, f.anisotropic);
    double w1 = calibrate_w0(c, ds, ds);
    double w2 = calibrate_w0(c, ds, ds);
    CHECK(w1 == w2);
    CHECK(w1 > 0.0);

    // doubling all eigenvalues quadruples every ctsf, quartering the weight
    auto scaled = ds;
    for (auto& d : scaled)
        for (auto& l : d.eigenvalues) l *= 2.0;
    double ws = calibrate_w0(c, scaled, scaled);
    CHECK(ws == doctest::Approx(w1 / 4.0).epsilon(1e-12));

    // identical shape scores everywhere: calibration degrades to zero
    auto flat = ds;
    for (auto& d : flat) d.eigenvalues = {1.0, 0.5, 0.25};
    CHECK(calibrate_w0(c, flat, flat) == 0.0);
}
