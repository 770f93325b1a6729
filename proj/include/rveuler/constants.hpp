// Physical constants (km, s, rad). These are defaults only; every scenario
// takes them from configuration.
#pragma once

#include <numbers>

namespace rveuler {

struct PlanetConstants {
    double mu = 398600.4418;    // km^3/s^2
    double omega = 7.292115e-5; // rad/s, rotation rate about e3
    double radius = 6378.0;     // km
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

} // namespace rveuler
