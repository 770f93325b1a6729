// Force providers for the rv-Euler dynamics: point-mass gravity and a
// lift/drag entry model with an exponential atmosphere.
#pragma once

#include <rveuler/errors.hpp>
#include <rveuler/euler_params.hpp>
#include <rveuler/rv_euler_dynamics.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace rveuler {

/// Point-mass gravity, -m mu / r^2 along a1, resolved in B.
struct TwoBodyGravity {
    double mu = 398600.4418; // km^3/s^2

    ForceOutput operator()(double /*t*/, const RvEulerState& s, const Mat3& /*c_ae*/, const Mat3& c_ba,
                           double mass) const {
        return {-mass * mu / (s.r * s.r) * c_ba.col(0)};
    }
};

inline TwoBodyGravity two_body_force_provider(double mu) {
    if (!(mu > 0.0))
        throw InvalidInput("two_body_force_provider: mu must be positive");
    return {mu};
}

/// Placeholder aerodynamics: exponential atmosphere, linear lift curve,
/// parabolic drag polar. Units: kg, km, s (forces in kg km / s^2).
struct AeroModel {
    double rho0 = 1.225e9;       // kg/km^3 at zero altitude
    double scale_height = 7.5;   // km
    double planet_radius = 6378.0; // km
    double h_floor = 0.0;        // km, densities below this altitude are not modelled
    double area = 4.839e-7;      // km^2 reference area
    double cl_alpha = 1.0;       // 1/rad
    double cd0 = 0.05;
    double k = 0.5;              // induced drag factor

    double altitude(double r) const { return r - planet_radius; }

    double density(double r) const {
        const double h = altitude(r);
        if (!(h >= h_floor))
            throw DomainError("atmosphere: altitude " + std::to_string(h) + " km is below the model floor " +
                              std::to_string(h_floor) + " km");
        return rho0 * std::exp(-h / scale_height);
    }

    double dynamic_pressure(double r, double v) const { return 0.5 * density(r) * v * v; }
    double lift_coefficient(double alpha) const { return cl_alpha * alpha; }

    double drag_coefficient(double alpha) const {
        const double cl = lift_coefficient(alpha);
        return cd0 + k * cl * cl;
    }

    /// Angle of attack maximizing L/D.
    double alpha_max_lift_to_drag() const { return std::sqrt(cd0 / k) / cl_alpha; }
};

/// Piecewise-linear table, held constant beyond its end points.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;

    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
        if (knots_.empty())
            throw InvalidInput("piecewise-linear profile needs at least one knot");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i].first > knots_[i - 1].first))
                throw InvalidInput("piecewise-linear profile times must be strictly increasing");
    }

    static PiecewiseLinear constant(double value) { return PiecewiseLinear({{0.0, value}}); }

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double operator()(double t) const {
        const auto [i, w] = locate(t);
        if (w < 0.0)
            return knots_[i].second;
        return knots_[i].second + w * (knots_[i + 1].second - knots_[i].second);
    }

    /// Slope on the segment containing t (zero outside the table).
    double slope(double t) const {
        const auto [i, w] = locate(t);
        if (w < 0.0)
            return 0.0;
        return (knots_[i + 1].second - knots_[i].second) / (knots_[i + 1].first - knots_[i].first);
    }

    bool covers(double t0, double tf) const {
        return knots_.size() == 1 || (knots_.front().first <= t0 && knots_.back().first >= tf);
    }

private:
    // Segment index and fraction; fraction < 0 means "clamped to knot i".
    std::pair<std::size_t, double> locate(double t) const {
        if (knots_.empty())
            throw InvalidInput("evaluating an empty piecewise-linear profile");
        if (knots_.size() == 1 || t <= knots_.front().first)
            return {0, -1.0};
        if (t >= knots_.back().first)
            return {knots_.size() - 1, -1.0};
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                         [](double x, const auto& k) { return x < k.first; });
        const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
        const double w = (t - knots_[i].first) / (knots_[i + 1].first - knots_[i].first);
        return {i, w};
    }

    std::vector<std::pair<double, double>> knots_;
};

/// Aerodynamic quantities at one instant.
struct AeroSample {
    double q = 0.0;     // dynamic pressure
    double lift = 0.0;  // force magnitude
    double drag = 0.0;
    double alpha = 0.0; // rad
    double sigma = 0.0; // rad, rotation about b1 from b2 toward the lift direction
};

/// Lift, drag and gravity. Bank angle is measured about b1 from b2.
struct EntryForces {
    AeroModel aero;
    double mu = 398600.4418;
    PiecewiseLinear alpha_profile = PiecewiseLinear::constant(0.0); // rad
    PiecewiseLinear sigma_profile = PiecewiseLinear::constant(0.0); // rad

    AeroSample sample(double t, double r, double v) const {
        AeroSample a;
        a.alpha = alpha_profile(t);
        a.sigma = sigma_profile(t);
        a.q = aero.dynamic_pressure(r, v);
        a.lift = a.q * aero.area * aero.lift_coefficient(a.alpha);
        a.drag = a.q * aero.area * aero.drag_coefficient(a.alpha);
        return a;
    }

    ForceOutput operator()(double t, const RvEulerState& s, const Mat3& /*c_ae*/, const Mat3& c_ba,
                           double mass) const {
        const AeroSample a = sample(t, s.r, s.v);
        const Vec3 aero_force(-a.drag, a.lift * std::cos(a.sigma), a.lift * std::sin(a.sigma));
        return {aero_force - mass * mu / (s.r * s.r) * c_ba.col(0)};
    }
};

inline EntryForces entry_force_provider(const AeroModel& aero, double mu, PiecewiseLinear alpha_profile,
                                        PiecewiseLinear sigma_profile) {
    if (!(mu > 0.0))
        throw InvalidInput("entry_force_provider: mu must be positive");
    return {aero, mu, std::move(alpha_profile), std::move(sigma_profile)};
}

} // namespace rveuler
