#include "test_support.hpp"

#include <rveuler/state_conversion.hpp>

#include <gtest/gtest.h>

using namespace rveuler;
using rveuler::oracle::principal_dcm;
using rveuler::oracle::Rng;

namespace {

constexpr double kMu = 398600.4418;

SphericalState orbit_ic() { return {6971.0, 0.0, 0.0, std::sqrt(kMu / 6971.0), 0.0, deg2rad(-172.223)}; }

CartesianState random_cartesian(Rng& rng) {
    return {rng.unit_vector() * rng.uniform(6400.0, 9000.0), rng.unit_vector() * rng.uniform(0.1, 10.0)};
}

} // namespace

TEST(OrbitInitialState, HAlignedReproducesTabulatedParameters) {
    const RvEulerState s = rv_euler_from_spherical(orbit_ic(), InitPolicy::h_aligned());
    EXPECT_NEAR(s.r, 6971.0, 1e-12);
    EXPECT_NEAR(s.v, 7.561733136872838, 1e-12);
    EXPECT_NEAR(s.ep_a.eps.x(), -0.7534314334553345, 1e-12);
    EXPECT_NEAR(s.ep_a.eps.y(), 0.0, 1e-14);
    EXPECT_NEAR(s.ep_a.eps.z(), 0.0, 1e-14);
    EXPECT_NEAR(s.ep_a.eta, 0.6575264824183433, 1e-12);
    EXPECT_NEAR(s.ep_b.eps.x(), 0.0, 1e-14);
    EXPECT_NEAR(s.ep_b.eps.y(), 0.0, 1e-14);
    EXPECT_NEAR(s.ep_b.eps.z(), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(s.ep_b.eta, std::sqrt(0.5), 1e-12);
}

TEST(HAligned, ThirdAxesAlongAngularMomentum) {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const CartesianState c = random_cartesian(rng);
        const RvEulerState s = rv_euler_from_cartesian(c);
        const Mat3 c_ae = s.c_ae();
        const Mat3 c_be = s.c_ba() * c_ae;
        const Vec3 h = c.r.cross(c.v).normalized();
        EXPECT_LT((c_ae.row(2).transpose() - h).norm(), 1e-12);
        EXPECT_LT((c_be.row(2).transpose() - h).norm(), 1e-12);
        EXPECT_LT((c_ae.row(0).transpose() - c.r.normalized()).norm(), 1e-13);
        EXPECT_LT((c_be.row(0).transpose() - c.v.normalized()).norm(), 1e-13);
    }
}

TEST(CartesianRoundTrip, RandomStatesBothPolicies) {
    Rng rng(32);
    for (int i = 0; i < 1000; ++i) {
        const CartesianState c = random_cartesian(rng);
        const CartesianState a = cartesian_from_rv_euler(rv_euler_from_cartesian(c));
        EXPECT_LT((a.r - c.r).norm(), 1e-12 * c.r.norm());
        EXPECT_LT((a.v - c.v).norm(), 1e-12 * c.v.norm());

        // Custom seed: any C_AE with first row r_hat
        const Vec3 r_hat = c.r.normalized();
        const Vec3 t = r_hat.cross(rng.unit_vector()).normalized();
        const Mat3 seed = (Mat3() << r_hat.transpose(), t.transpose(), r_hat.cross(t).transpose()).finished();
        const CartesianState b = cartesian_from_rv_euler(rv_euler_from_cartesian(c, InitPolicy::custom(seed)));
        EXPECT_LT((b.r - c.r).norm(), 1e-12 * c.r.norm());
        EXPECT_LT((b.v - c.v).norm(), 1e-12 * c.v.norm());
    }
}

TEST(HAligned, RejectsParallelPositionAndVelocity) {
    const CartesianState up{Vec3(7000, 0, 0), Vec3(3, 0, 0)};
    const CartesianState down{Vec3(7000, 0, 0), Vec3(-3, 0, 0)};
    EXPECT_THROW(rv_euler_from_cartesian(up), DegenerateGeometry);
    EXPECT_THROW(rv_euler_from_cartesian(down), DegenerateGeometry);
    EXPECT_THROW(rv_euler_from_cartesian({Vec3::Zero(), Vec3(1, 0, 0)}), DegenerateGeometry);
    EXPECT_THROW(rv_euler_from_cartesian({Vec3(7000, 0, 0), Vec3::Zero()}), DegenerateGeometry);
}

TEST(Custom, HandlesRadialFlight) {
    const InitPolicy p = InitPolicy::custom(Mat3::Identity());
    const RvEulerState up = rv_euler_from_cartesian({Vec3(7000, 0, 0), Vec3(3, 0, 0)}, p);
    EXPECT_NEAR(up.ep_b.eta, 1.0, 1e-15);

    // straight down: b1 = -a1, the vertical-impact configuration
    const RvEulerState down = rv_euler_from_cartesian({Vec3(7000, 0, 0), Vec3(-3, 0, 0)}, p);
    EXPECT_NEAR(down.ep_b.eps.x(), 0.0, 1e-15);
    EXPECT_NEAR(down.ep_b.eta, 0.0, 1e-15);
    EXPECT_LT((cartesian_from_rv_euler(down).v - Vec3(-3, 0, 0)).norm(), 1e-14);

    // nearly antiparallel takes the half-turn branch
    const Vec3 v(-3.0, 1e-10, -2e-10);
    const RvEulerState near = rv_euler_from_cartesian({Vec3(7000, 0, 0), v}, p);
    EXPECT_LT((cartesian_from_rv_euler(near).v - v).norm(), 1e-14);
}

TEST(Custom, BIsMinimalRotationOfA) {
    // rotation axis perpendicular to both a1 and v_hat
    Rng rng(33);
    for (int i = 0; i < 100; ++i) {
        const CartesianState c{Vec3(7000, 0, 0), rng.unit_vector() * 5.0};
        const RvEulerState s = rv_euler_from_cartesian(c, InitPolicy::custom(Mat3::Identity()));
        const Vec3 axis = s.ep_b.eps;
        if (axis.norm() < 1e-12)
            continue;
        EXPECT_NEAR(axis.x(), 0.0, 1e-14);
        EXPECT_NEAR(axis.dot(c.v.normalized()), 0.0, 1e-14);
    }
}

TEST(Custom, SeedMustAlignWithPosition) {
    const CartesianState c{Vec3(7000, 0, 0), Vec3(0, 7, 0)};
    EXPECT_THROW(rv_euler_from_cartesian(c, InitPolicy::custom(principal_dcm(2, 0.1))), InvalidInput);
    EXPECT_THROW(rv_euler_from_cartesian(c, InitPolicy::custom(Mat3(2.0 * Mat3::Identity()))), InvalidInput);
    EXPECT_NO_THROW(rv_euler_from_cartesian(c, InitPolicy::custom(principal_dcm(0, 0.5))));
}

TEST(Custom, SeedRotationAboutPositionLeavesCartesianStateUnchanged) {
    const CartesianState c = cartesian_from_spherical(orbit_ic());
    const RvEulerState a = rv_euler_from_cartesian(c, InitPolicy::custom(Mat3::Identity()));
    const RvEulerState b = rv_euler_from_cartesian(c, InitPolicy::custom(principal_dcm(0, deg2rad(30.0))));
    EXPECT_GT((a.ep_a.eps - b.ep_a.eps).norm(), 0.1);
    EXPECT_LT((cartesian_from_rv_euler(a).v - cartesian_from_rv_euler(b).v).norm(), 1e-14);
}

TEST(Spherical, LocalBasisIsRightHanded) {
    const LocalBasis b = LocalBasis::at(0.3, -0.7);
    EXPECT_LT((b.up.cross(b.east) - b.north).norm(), 1e-15);
    EXPECT_NEAR(b.up.dot(b.east), 0.0, 1e-15);
    EXPECT_NEAR(b.north.norm(), 1.0, 1e-15);
}

TEST(Spherical, OrbitInitialCartesianState) {
    const CartesianState c = cartesian_from_spherical(orbit_ic());
    EXPECT_LT((c.r - Vec3(6971, 0, 0)).norm(), 1e-12);
    const double v = std::sqrt(kMu / 6971.0);
    EXPECT_NEAR(c.v.x(), 0.0, 1e-15);
    EXPECT_NEAR(c.v.y(), v * std::sin(deg2rad(-172.223)), 1e-14);
    EXPECT_NEAR(c.v.z(), v * std::cos(deg2rad(-172.223)), 1e-14);
}

TEST(Spherical, RandomRoundTrips) {
    Rng rng(34);
    for (int i = 0; i < 1000; ++i) {
        const SphericalState s{rng.uniform(6400, 9000), rng.uniform(-3.1, 3.1), rng.uniform(-1.5, 1.5),
                               rng.uniform(0.1, 10),    rng.uniform(-1.5, 1.5), rng.uniform(-3.1, 3.1)};
        const SphericalState back = spherical_from_cartesian(cartesian_from_spherical(s));
        EXPECT_NEAR(back.r, s.r, 1e-12 * s.r);
        EXPECT_NEAR(back.phi, s.phi, 1e-12);
        EXPECT_NEAR(back.theta, s.theta, 1e-12);
        EXPECT_NEAR(back.v, s.v, 1e-12 * s.v);
        EXPECT_NEAR(back.gamma, s.gamma, 1e-11);
        EXPECT_NEAR(back.psi, s.psi, 1e-11);

        const SphericalState via_rv = spherical_from_rv_euler(rv_euler_from_spherical(s));
        EXPECT_NEAR(via_rv.theta, s.theta, 1e-11);
        EXPECT_NEAR(via_rv.psi, s.psi, 1e-10);
    }
}

TEST(Spherical, DegenerateGeometryIsRejected) {
    EXPECT_THROW(cartesian_from_spherical({7000, 0, kHalfPi, 7, 0, 0}), DegenerateGeometry);
    EXPECT_THROW(spherical_from_cartesian({Vec3(0, 0, 7000), Vec3(7, 0, 0)}), DegenerateGeometry);
    EXPECT_THROW(spherical_from_cartesian({Vec3(7000, 0, 0), Vec3(-7, 0, 0)}), DegenerateGeometry);
    EXPECT_THROW(spherical_from_cartesian({Vec3(7000, 0, 0), Vec3::Zero()}), DegenerateGeometry);
}
