// rv-Euler equations of motion
//
// State: radial distance r, Euler parameters of C_AE (position frame A with
// a1 along r), speed v observed in E, Euler parameters of C_BA (velocity
// frame B with b1 along the E-observed velocity). The residual spins about a1
// and b1 are fixed by omega_A1 = omega_B1 = 0.
#pragma once

#include <rveuler/errors.hpp>
#include <rveuler/euler_params.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <functional>
#include <string>

namespace rveuler {

struct RvEulerState {
    double r = 1.0; // km
    EulerParams ep_a;
    double v = 1.0; // km/s
    EulerParams ep_b;

    using Vector = Eigen::Matrix<double, 10, 1>;

    /// Packed as (r, epsA1..3, etaA, v, epsB1..3, etaB).
    Vector to_vector() const {
        Vector y;
        y << r, ep_a.eps, ep_a.eta, v, ep_b.eps, ep_b.eta;
        return y;
    }

    static RvEulerState from_vector(const Vector& y) {
        return {y(0), {y.segment<3>(1), y(4)}, y(5), {y.segment<3>(6), y(9)}};
    }

    // Evaluated without normalization; see dcm_quadratic_form.
    Mat3 c_ae() const { return dcm_quadratic_form(ep_a); }
    Mat3 c_ba() const { return dcm_quadratic_form(ep_b); }
};

struct RvEulerRates {
    double r_dot = 0.0;
    EulerParamRates ep_a;
    double v_dot = 0.0;
    EulerParamRates ep_b;
    // diagnostics, rad/s
    double omega_a2 = 0.0;
    double omega_a3 = 0.0;
    double omega_b2 = 0.0;
    double omega_b3 = 0.0;

    RvEulerState::Vector to_vector() const {
        RvEulerState::Vector y;
        y << r_dot, ep_a.eps_dot, ep_a.eta_dot, v_dot, ep_b.eps_dot, ep_b.eta_dot;
        return y;
    }
};

/// Motion of the observation frame E relative to the inertial frame N, both
/// vectors expressed in the E basis.
struct ObservationFrameSpec {
    Vec3 omega = Vec3::Zero(); // rad/s
    Vec3 alpha = Vec3::Zero(); // rad/s^2

    static ObservationFrameSpec inertial() { return {}; }
    static ObservationFrameSpec spinning_about_e3(double rate) { return {Vec3(0.0, 0.0, rate), Vec3::Zero()}; }

    bool is_inertial() const { return omega.isZero(0.0) && alpha.isZero(0.0); }
};

/// Physical force resolved in the B basis.
struct ForceOutput {
    Vec3 f = Vec3::Zero();
};

/// Force model: (t, state, C_AE, C_BA, mass) -> physical force in the B basis.
template <class F>
concept ForceProvider =
    std::invocable<const F&, double, const RvEulerState&, const Mat3&, const Mat3&, double> &&
    std::convertible_to<std::invoke_result_t<const F&, double, const RvEulerState&, const Mat3&, const Mat3&, double>,
                        ForceOutput>;

using AnyForceProvider = std::function<ForceOutput(double, const RvEulerState&, const Mat3&, const Mat3&, double)>;

struct KinematicRates {
    double r_dot = 0.0;
    double omega_a2 = 0.0;
    double omega_a3 = 0.0;
    EulerParamRates ep_a;
};

struct KineticRates {
    double v_dot = 0.0;
    double omega_b2 = 0.0;
    double omega_b3 = 0.0;
    EulerParamRates ep_b;
};

struct DynamicsOptions {
    double v_min = 1e-9; // km/s; the kinetic equations divide by v
};

namespace detail {

// Quaternion rates with the first angular velocity component held at zero.
inline EulerParamRates constrained_rates(const EulerParams& ep, double w2, double w3) {
    const double e1 = ep.eps.x(), e2 = ep.eps.y(), e3 = ep.eps.z(), h = ep.eta;
    EulerParamRates out;
    out.eps_dot = Vec3(-0.5 * w2 * e3 + 0.5 * w3 * e2,
                       0.5 * w2 * h - 0.5 * w3 * e1,
                       0.5 * w2 * e1 + 0.5 * w3 * h);
    out.eta_dot = -0.5 * w2 * e2 - 0.5 * w3 * e3;
    return out;
}

inline void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("rv-Euler state: radius must be positive (r = " + std::to_string(r) + ")");
}

inline void check_speed(double v, double v_min) {
    if (!(v > v_min) || !std::isfinite(v))
        throw DomainError("rv-Euler state: speed " + std::to_string(v) +
                          " km/s is at or below v_min; kinetic equations are singular at zero speed");
}

} // namespace detail

/// r_dot, omega_A2, omega_A3 and the C_AE parameter rates.
inline KinematicRates kinematic_rates(const RvEulerState& s) {
    detail::check_radius(s.r);
    const double e1 = s.ep_b.eps.x(), e2 = s.ep_b.eps.y(), e3 = s.ep_b.eps.z(), h = s.ep_b.eta;
    KinematicRates k;
    k.r_dot = s.v * (1.0 - 2.0 * (e2 * e2 + e3 * e3));
    k.omega_a2 = 2.0 * s.v / s.r * (h * e2 - e1 * e3);
    k.omega_a3 = 2.0 * s.v / s.r * (h * e3 + e1 * e2);
    k.ep_a = detail::constrained_rates(s.ep_a, k.omega_a2, k.omega_a3);
    return k;
}

/// Apparent force per unit mass in the B basis: physical force minus the
/// Coriolis, Euler and centripetal terms of the observation frame. Equals the
/// E-observed acceleration.
inline Vec3 apparent_force(const RvEulerState& s, const Mat3& c_ae, const Mat3& c_ba, const ForceOutput& force,
                           const ObservationFrameSpec& frame, double mass) {
    if (!(mass > 0.0))
        throw InvalidInput("apparent_force: mass must be positive");
    Vec3 a = force.f / mass;
    if (frame.is_inertial())
        return a;

    const Mat3 c_be = c_ba * c_ae;
    const Vec3& w = frame.omega;
    const Vec3& al = frame.alpha;

    Mat3 coriolis = Mat3::Zero();
    coriolis.row(1) = c_be.row(2);
    coriolis.row(2) = -c_be.row(1);

    Mat3 euler = Mat3::Zero();
    euler.row(1) = c_ae.row(2);
    euler.row(2) = -c_ae.row(1);

    Mat3 centripetal;
    centripetal << -w.y() * w.y() - w.z() * w.z(), w.x() * w.y(), w.x() * w.z(),
                   w.y() * w.x(), -w.x() * w.x() - w.z() * w.z(), w.y() * w.z(),
                   w.z() * w.x(), w.z() * w.y(), -w.x() * w.x() - w.y() * w.y();

    a -= 2.0 * s.v * coriolis * w;
    a -= s.r * c_ba * euler * al;
    a -= s.r * c_be * centripetal * c_ae.row(0).transpose();
    return a;
}

inline Vec3 apparent_force(const RvEulerState& s, const ForceOutput& force, const ObservationFrameSpec& frame,
                           double mass) {
    return apparent_force(s, s.c_ae(), s.c_ba(), force, frame, mass);
}

/// v_dot, omega_B2, omega_B3 and the C_BA parameter rates.
inline KineticRates kinetic_rates(const RvEulerState& s, const Vec3& f_tilde_over_m, double omega_a2, double omega_a3,
                                  const DynamicsOptions& opt = {}) {
    detail::check_speed(s.v, opt.v_min);
    const double e1 = s.ep_b.eps.x(), e2 = s.ep_b.eps.y(), e3 = s.ep_b.eps.z(), h = s.ep_b.eta;
    KineticRates k;
    k.v_dot = f_tilde_over_m.x();
    k.omega_b2 = -f_tilde_over_m.z() / s.v - omega_a2 * (1.0 - 2.0 * (e1 * e1 + e3 * e3)) -
                 2.0 * omega_a3 * (e2 * e3 + e1 * h);
    k.omega_b3 = f_tilde_over_m.y() / s.v - 2.0 * omega_a2 * (e2 * e3 - e1 * h) -
                 omega_a3 * (1.0 - 2.0 * (e1 * e1 + e2 * e2));
    k.ep_b = detail::constrained_rates(s.ep_b, k.omega_b2, k.omega_b3);
    return k;
}

/// Full ten-element rate vector. No renormalization is applied here.
template <ForceProvider F>
RvEulerRates state_derivative(double t, const RvEulerState& s, const F& provider, const ObservationFrameSpec& frame,
                              double mass, const DynamicsOptions& opt = {}) {
    detail::check_radius(s.r);
    detail::check_speed(s.v, opt.v_min);
    const Mat3 c_ae = s.c_ae();
    const Mat3 c_ba = s.c_ba();

    const KinematicRates kin = kinematic_rates(s);
    const ForceOutput force = provider(t, s, c_ae, c_ba, mass);
    const Vec3 f_tilde = apparent_force(s, c_ae, c_ba, force, frame, mass);
    const KineticRates kit = kinetic_rates(s, f_tilde, kin.omega_a2, kin.omega_a3, opt);

    RvEulerRates out;
    out.r_dot = kin.r_dot;
    out.ep_a = kin.ep_a;
    out.v_dot = kit.v_dot;
    out.ep_b = kit.ep_b;
    out.omega_a2 = kin.omega_a2;
    out.omega_a3 = kin.omega_a3;
    out.omega_b2 = kit.omega_b2;
    out.omega_b3 = kit.omega_b3;
    return out;
}

} // namespace rveuler
