// Euler parameter (unit quaternion) algebra
//
// Conventions: C_BA maps column matrices expressed in the A basis to the B
// basis, {p}_B = C_BA {p}_A. Angular velocity passed to the rate relations is
// that of B relative to A, expressed in the B basis.
#pragma once

#include <rveuler/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace rveuler {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion: vector part eps = (e1, e2, e3), scalar part eta.
struct EulerParams {
    Vec3 eps = Vec3::Zero();
    double eta = 1.0;

    static EulerParams identity() { return {}; }

    double norm() const { return std::sqrt(eps.squaredNorm() + eta * eta); }

    EulerParams operator-() const { return {-eps, -eta}; }

    std::array<double, 4> as_array() const { return {eps.x(), eps.y(), eps.z(), eta}; }

    static EulerParams from_array(const std::array<double, 4>& a) {
        return {Vec3(a[0], a[1], a[2]), a[3]};
    }
};

/// Time derivative of an EulerParams value.
struct EulerParamRates {
    Vec3 eps_dot = Vec3::Zero();
    double eta_dot = 0.0;

    /// eps . eps_dot + eta * eta_dot, zero for rates that preserve the unit norm.
    double norm_rate(const EulerParams& ep) const { return ep.eps.dot(eps_dot) + ep.eta * eta_dot; }
};

struct AxisAngle {
    Vec3 axis = Vec3::UnitZ();
    double angle = 0.0; // rad
};

namespace tolerance {
inline constexpr double kAxisUnit = 1e-12;
inline constexpr double kDcmNorm = 1e-6;
inline constexpr double kRotationMatrix = 1e-9;
} // namespace tolerance

/// [p]x such that skew(p) * q == p.cross(q).
inline Mat3 skew(const Vec3& p) {
    Mat3 m;
    m << 0.0, -p.z(), p.y(),
         p.z(), 0.0, -p.x(),
         -p.y(), p.x(), 0.0;
    return m;
}

inline EulerParams euler_params_from_axis_angle(const AxisAngle& aa) {
    const double n = aa.axis.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tolerance::kAxisUnit)
        throw InvalidInput("euler_params_from_axis_angle: axis is not a unit vector (norm " +
                           std::to_string(n) + ")");
    const double half = 0.5 * aa.angle;
    return {aa.axis * std::sin(half), std::cos(half)};
}

/// The quadratic form of the DCM evaluated as-is, without a norm check. This is
/// what the equations of motion use, so integration drift in the quaternion
/// norm shows up as drift rather than as an exception.
inline Mat3 dcm_quadratic_form(const EulerParams& ep) {
    const double e1 = ep.eps.x(), e2 = ep.eps.y(), e3 = ep.eps.z(), h = ep.eta;
    Mat3 c;
    c << 1.0 - 2.0 * (e2 * e2 + e3 * e3), 2.0 * (e1 * e2 + e3 * h), 2.0 * (e1 * e3 - e2 * h),
         2.0 * (e2 * e1 - e3 * h), 1.0 - 2.0 * (e3 * e3 + e1 * e1), 2.0 * (e2 * e3 + e1 * h),
         2.0 * (e3 * e1 + e2 * h), 2.0 * (e3 * e2 - e1 * h), 1.0 - 2.0 * (e1 * e1 + e2 * e2);
    return c;
}

/// Direction cosine matrix C_BA for the rotation encoded by ep.
inline Mat3 dcm_from_euler_params(const EulerParams& ep) {
    const double n = ep.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tolerance::kDcmNorm)
        throw InvalidInput("dcm_from_euler_params: quaternion norm " + std::to_string(n) +
                           " deviates from unity");
    return dcm_quadratic_form(ep);
}

/// Inverse of dcm_from_euler_params with eta >= 0. The largest of the four
/// squared components is extracted first so no division is by a small number.
inline EulerParams euler_params_from_dcm(const Mat3& c) {
    if (!c.allFinite())
        throw InvalidInput("euler_params_from_dcm: non-finite matrix");
    const double ortho = (c.transpose() * c - Mat3::Identity()).cwiseAbs().maxCoeff();
    const double det = c.determinant();
    if (ortho > tolerance::kRotationMatrix || std::abs(det - 1.0) > tolerance::kRotationMatrix)
        throw InvalidInput("euler_params_from_dcm: matrix is not a proper rotation");

    const double tr = c.trace();
    // 4 * squared component for eta, e1, e2, e3
    const std::array<double, 4> sq{1.0 + tr,
                                   1.0 + c(0, 0) - c(1, 1) - c(2, 2),
                                   1.0 - c(0, 0) + c(1, 1) - c(2, 2),
                                   1.0 - c(0, 0) - c(1, 1) + c(2, 2)};
    const auto k = static_cast<int>(std::max_element(sq.begin(), sq.end()) - sq.begin());

    double e1 = 0.0, e2 = 0.0, e3 = 0.0, h = 0.0;
    switch (k) {
    case 0:
        h = 0.5 * std::sqrt(sq[0]);
        e1 = (c(1, 2) - c(2, 1)) / (4.0 * h);
        e2 = (c(2, 0) - c(0, 2)) / (4.0 * h);
        e3 = (c(0, 1) - c(1, 0)) / (4.0 * h);
        break;
    case 1:
        e1 = 0.5 * std::sqrt(sq[1]);
        h = (c(1, 2) - c(2, 1)) / (4.0 * e1);
        e2 = (c(0, 1) + c(1, 0)) / (4.0 * e1);
        e3 = (c(0, 2) + c(2, 0)) / (4.0 * e1);
        break;
    case 2:
        e2 = 0.5 * std::sqrt(sq[2]);
        h = (c(2, 0) - c(0, 2)) / (4.0 * e2);
        e1 = (c(0, 1) + c(1, 0)) / (4.0 * e2);
        e3 = (c(1, 2) + c(2, 1)) / (4.0 * e2);
        break;
    default:
        e3 = 0.5 * std::sqrt(sq[3]);
        h = (c(0, 1) - c(1, 0)) / (4.0 * e3);
        e1 = (c(0, 2) + c(2, 0)) / (4.0 * e3);
        e2 = (c(1, 2) + c(2, 1)) / (4.0 * e3);
        break;
    }
    EulerParams ep{Vec3(e1, e2, e3), h};
    if (ep.eta < 0.0)
        ep = -ep;
    return ep;
}

/// Quaternion rates for angular velocity omega (B relative to A, in B basis).
inline EulerParamRates euler_param_rates(const EulerParams& ep, const Vec3& omega) {
    const double e1 = ep.eps.x(), e2 = ep.eps.y(), e3 = ep.eps.z(), h = ep.eta;
    const double w1 = omega.x(), w2 = omega.y(), w3 = omega.z();
    EulerParamRates r;
    r.eps_dot = 0.5 * Vec3(h * w1 - e3 * w2 + e2 * w3,
                           e3 * w1 + h * w2 - e1 * w3,
                           -e2 * w1 + e1 * w2 + h * w3);
    r.eta_dot = -0.5 * (e1 * w1 + e2 * w2 + e3 * w3);
    return r;
}

/// Angular velocity (in B basis) recovered from quaternion rates.
inline Vec3 omega_from_rates(const EulerParams& ep, const EulerParamRates& rates) {
    const double e1 = ep.eps.x(), e2 = ep.eps.y(), e3 = ep.eps.z(), h = ep.eta;
    const double d1 = rates.eps_dot.x(), d2 = rates.eps_dot.y(), d3 = rates.eps_dot.z();
    const double dh = rates.eta_dot;
    return 2.0 * Vec3(h * d1 - dh * e1 + e3 * d2 - d3 * e2,
                      h * d2 - dh * e2 - e3 * d1 + d3 * e1,
                      h * d3 - dh * e3 + e2 * d1 - d2 * e1);
}

inline EulerParams normalize(const EulerParams& ep) {
    const double n = ep.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw InvalidInput("normalize: quaternion has zero or non-finite norm");
    return {ep.eps / n, ep.eta / n};
}

} // namespace rveuler
