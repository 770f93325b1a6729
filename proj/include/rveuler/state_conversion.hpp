// Conversions among Cartesian, spherical and rv-Euler states.
//
// The rv-Euler state is not unique: rotations of (a2, a3) about r and of
// (b2, b3) about v are free. InitPolicy fixes that choice at initialization;
// the dynamics keep it fixed afterwards through omega_A1 = omega_B1 = 0.
#pragma once

#include <rveuler/errors.hpp>
#include <rveuler/euler_params.hpp>
#include <rveuler/rv_euler_dynamics.hpp>
#include <rveuler/spherical_dynamics.hpp>

#include <cmath>
#include <string>

namespace rveuler {

/// Position and E-observed velocity, both in the E basis.
struct CartesianState {
    Vec3 r = Vec3::UnitX(); // km
    Vec3 v = Vec3::Zero();  // km/s
};

/// How the free rotations about r_hat and v_hat are resolved.
///
/// HAligned: a3 = b3 = h_hat (unit specific angular momentum), which needs r
/// and v not parallel. Custom: the caller supplies C_AE, whose first row must
/// be r_hat; B is then the smallest rotation of A carrying a1 onto v_hat (a
/// half turn about a3 when v is antiparallel to r).
struct InitPolicy {
    enum class Kind { HAligned, Custom };

    Kind kind = Kind::HAligned;
    Mat3 c_ae_seed = Mat3::Identity();

    static InitPolicy h_aligned() { return {}; }
    static InitPolicy custom(const Mat3& c_ae) { return {Kind::Custom, c_ae}; }
    static InitPolicy custom(const EulerParams& ep_a) { return {Kind::Custom, dcm_from_euler_params(ep_a)}; }
};

namespace detail {

inline constexpr double kParallelTol = 1e-12;
inline constexpr double kSeedAxisTol = 1e-9;

// Rotation matrix R (active, in A coordinates) carrying e1 onto unit vector u
// about the axis e1 x u.
inline Mat3 minimal_rotation_from_e1(const Vec3& u) {
    const Vec3 k = Vec3::UnitX().cross(u);
    const double s = k.norm();
    const double c = u.x();
    if (s > 1e-8) {
        const Mat3 kx = skew(k / s);
        const double angle = std::atan2(s, c);
        return Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
    }
    if (c > 0.0) {
        const Mat3 kx = skew(k);
        return Mat3::Identity() + kx + kx * kx / (1.0 + c);
    }
    // Nearly antiparallel: half turn about e3, then the small remaining rotation.
    const Mat3 half_turn = Vec3(-1.0, -1.0, 1.0).asDiagonal();
    const Vec3 k2 = (-Vec3::UnitX()).cross(u);
    const Mat3 kx = skew(k2);
    const Mat3 small = Mat3::Identity() + kx + kx * kx / (1.0 - c);
    return small * half_turn;
}

// DCM whose rows are the given (orthonormal) basis vectors.
inline Mat3 dcm_from_rows(const Vec3& x1, const Vec3& x2, const Vec3& x3) {
    Mat3 c;
    c.row(0) = x1.transpose();
    c.row(1) = x2.transpose();
    c.row(2) = x3.transpose();
    return c;
}

} // namespace detail

inline CartesianState cartesian_from_rv_euler(const RvEulerState& s) {
    const Mat3 c_ae = s.c_ae();
    const Mat3 c_be = s.c_ba() * c_ae;
    return {s.r * c_ae.row(0).transpose(), s.v * c_be.row(0).transpose()};
}

inline RvEulerState rv_euler_from_cartesian(const CartesianState& c, const InitPolicy& policy = {}) {
    const double rn = c.r.norm();
    const double vn = c.v.norm();
    if (!(rn > 0.0) || !std::isfinite(rn))
        throw DegenerateGeometry("rv_euler_from_cartesian: position must be nonzero");
    if (!(vn > 0.0) || !std::isfinite(vn))
        throw DegenerateGeometry("rv_euler_from_cartesian: velocity must be nonzero");
    const Vec3 r_hat = c.r / rn;
    const Vec3 v_hat = c.v / vn;

    Mat3 c_ae;
    Mat3 c_ba;
    if (policy.kind == InitPolicy::Kind::HAligned) {
        const Vec3 h = r_hat.cross(v_hat);
        if (h.norm() <= detail::kParallelTol)
            throw DegenerateGeometry(
                "rv_euler_from_cartesian: r and v are parallel, angular momentum direction is undefined; "
                "use a Custom initialization policy");
        const Vec3 h_hat = h.normalized();
        c_ae = detail::dcm_from_rows(r_hat, h_hat.cross(r_hat), h_hat);
        const Mat3 c_be = detail::dcm_from_rows(v_hat, h_hat.cross(v_hat), h_hat);
        c_ba = c_be * c_ae.transpose();
    } else {
        c_ae = policy.c_ae_seed;
        // validates the seed as a proper rotation
        (void)euler_params_from_dcm(c_ae);
        if ((c_ae.row(0).transpose() - r_hat).norm() > detail::kSeedAxisTol)
            throw InvalidInput("rv_euler_from_cartesian: Custom seed first row must equal r_hat");
        const Vec3 v_in_a = c_ae * v_hat;
        c_ba = detail::minimal_rotation_from_e1(v_in_a.normalized()).transpose();
    }
    return {rn, euler_params_from_dcm(c_ae), vn, euler_params_from_dcm(c_ba)};
}

/// Local up, east, north unit vectors at (phi, theta), in the E basis.
struct LocalBasis {
    Vec3 up;
    Vec3 east;
    Vec3 north;

    static LocalBasis at(double phi, double theta) {
        const double cp = std::cos(phi), sp = std::sin(phi);
        const double ct = std::cos(theta), st = std::sin(theta);
        return {Vec3(ct * cp, ct * sp, st), Vec3(-sp, cp, 0.0), Vec3(-st * cp, -st * sp, ct)};
    }
};

inline CartesianState cartesian_from_spherical(const SphericalState& s) {
    if (!(s.r > 0.0))
        throw DegenerateGeometry("cartesian_from_spherical: radius must be positive");
    if (std::abs(std::cos(s.theta)) < spherical_guard::kCos)
        throw DegenerateGeometry("cartesian_from_spherical: latitude at a pole");
    const LocalBasis b = LocalBasis::at(s.phi, s.theta);
    const double cg = std::cos(s.gamma);
    const Vec3 dir = std::sin(s.gamma) * b.up + cg * std::sin(s.psi) * b.east + cg * std::cos(s.psi) * b.north;
    return {s.r * b.up, s.v * dir};
}

inline SphericalState spherical_from_cartesian(const CartesianState& c) {
    const double r = c.r.norm();
    const double rho = std::hypot(c.r.x(), c.r.y());
    if (!(r > 0.0) || rho <= spherical_guard::kCos * r)
        throw DegenerateGeometry("spherical_from_cartesian: position at the origin or on the polar axis");
    SphericalState s;
    s.r = r;
    s.phi = std::atan2(c.r.y(), c.r.x());
    s.theta = std::atan2(c.r.z(), rho);
    const LocalBasis b = LocalBasis::at(s.phi, s.theta);
    const double vu = c.v.dot(b.up), ve = c.v.dot(b.east), vn = c.v.dot(b.north);
    const double vh = std::hypot(ve, vn);
    s.v = c.v.norm();
    if (!(s.v > 0.0) || vh <= spherical_guard::kCos * s.v)
        throw DegenerateGeometry("spherical_from_cartesian: azimuth undefined for zero or vertical velocity");
    s.gamma = std::atan2(vu, vh);
    s.psi = std::atan2(ve, vn);
    return s;
}

inline RvEulerState rv_euler_from_spherical(const SphericalState& s, const InitPolicy& policy = {}) {
    return rv_euler_from_cartesian(cartesian_from_spherical(s), policy);
}

inline SphericalState spherical_from_rv_euler(const RvEulerState& s) {
    return spherical_from_cartesian(cartesian_from_rv_euler(s));
}

} // namespace rveuler
