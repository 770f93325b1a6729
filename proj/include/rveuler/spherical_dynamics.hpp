// Spherical-coordinate equations of motion: the baseline the rv-Euler form is
// compared against.
//
// Longitude phi and geocentric latitude theta locate r_hat =
// (cos th cos ph, cos th sin ph, sin th). Flight-path angle gamma is measured
// up from the local horizontal; azimuth psi from north, positive toward east.
#pragma once

#include <rveuler/constants.hpp>
#include <rveuler/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace rveuler {

struct SphericalState {
    double r = 1.0;     // km
    double phi = 0.0;   // rad, longitude
    double theta = 0.0; // rad, geocentric latitude
    double v = 1.0;     // km/s
    double gamma = 0.0; // rad, flight-path angle
    double psi = 0.0;   // rad, azimuth

    using Vector = Eigen::Matrix<double, 6, 1>;

    Vector to_vector() const {
        Vector y;
        y << r, phi, theta, v, gamma, psi;
        return y;
    }

    static SphericalState from_vector(const Vector& y) { return {y(0), y(1), y(2), y(3), y(4), y(5)}; }
};

struct SphericalRates {
    double r_dot = 0.0;
    double phi_dot = 0.0;
    double theta_dot = 0.0;
    double v_dot = 0.0;
    double gamma_dot = 0.0;
    double psi_dot = 0.0;

    SphericalState::Vector to_vector() const {
        SphericalState::Vector y;
        y << r_dot, phi_dot, theta_dot, v_dot, gamma_dot, psi_dot;
        return y;
    }
};

/// Aerodynamic accelerations for the spherical entry equations (force / mass).
/// Bank angle is zero for lift in the vertical plane pointing up and positive
/// toward v_hat x r_hat (right of the flight direction).
struct SphericalForces {
    double drag = 0.0; // km/s^2
    double lift = 0.0; // km/s^2
    double bank = 0.0; // rad
};

namespace spherical_guard {
inline constexpr double kCos = 1e-12;
/// Entry rates refuse |gamma| >= pi/2 - kVerticalAngle.
inline constexpr double kVerticalAngle = 1e-10;
} // namespace spherical_guard

namespace detail {

inline void check_pole(double theta) {
    if (std::abs(std::cos(theta)) < spherical_guard::kCos)
        throw SingularityError("spherical rates: latitude " + std::to_string(rad2deg(theta)) +
                               " deg is at a pole singularity");
}

inline void check_vertical(double gamma) {
    if (std::abs(gamma) >= kHalfPi - spherical_guard::kVerticalAngle ||
        std::abs(std::cos(gamma)) < spherical_guard::kCos)
        throw SingularityError("spherical rates: azimuth is undefined for vertical flight (gamma = " +
                               std::to_string(rad2deg(gamma)) + " deg)");
}

} // namespace detail

/// Two-body motion in an inertial frame.
inline SphericalRates two_body_spherical_rates(const SphericalState& s, double mu) {
    detail::check_pole(s.theta);
    const double cg = std::cos(s.gamma), sg = std::sin(s.gamma);
    const double cp = std::cos(s.psi), sp = std::sin(s.psi);
    const double ct = std::cos(s.theta), st = std::sin(s.theta);
    SphericalRates d;
    d.r_dot = s.v * sg;
    d.phi_dot = s.v / (s.r * ct) * cg * sp;
    d.theta_dot = s.v / s.r * cg * cp;
    d.v_dot = -mu / (s.r * s.r) * sg;
    d.gamma_dot = cg * (s.v / s.r - mu / (s.r * s.r * s.v));
    d.psi_dot = s.v / (s.r * ct) * cg * sp * st;
    return d;
}

/// Lift/drag/gravity motion observed in a frame spinning at omega_e about e3.
inline SphericalRates entry_spherical_rates(const SphericalState& s, const SphericalForces& f, double mu,
                                            double omega_e) {
    detail::check_pole(s.theta);
    detail::check_vertical(s.gamma);
    const double r = s.r, v = s.v, w = omega_e;
    const double g = mu / (r * r);
    const double cg = std::cos(s.gamma), sg = std::sin(s.gamma), tg = std::tan(s.gamma);
    const double cp = std::cos(s.psi), sp = std::sin(s.psi);
    const double ct = std::cos(s.theta), st = std::sin(s.theta), tt = std::tan(s.theta);
    const double cs = std::cos(f.bank), ss = std::sin(f.bank);

    SphericalRates d;
    d.r_dot = v * sg;
    d.phi_dot = v * cg * sp / (r * ct);
    d.theta_dot = v * cg * cp / r;
    d.v_dot = -f.drag - g * sg + w * w * r * ct * (sg * ct - cg * st * cp);
    d.gamma_dot = (f.lift * cs - g * cg + v * v / r * cg + 2.0 * w * v * ct * sp +
                   w * w * r * ct * (cg * ct + sg * cp * st)) / v;
    d.psi_dot = f.lift * ss / (v * cg) + v / r * cg * sp * tt - 2.0 * w * (tg * cp * ct - st) +
                r * w * w / (v * cg) * sp * st * ct;
    return d;
}

} // namespace rveuler
