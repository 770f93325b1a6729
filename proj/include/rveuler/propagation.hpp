// Fixed-step RK4 propagation, the circular-orbit reference solution, the
// position-error metric and step-count convergence studies.
#pragma once

#include <rveuler/constants.hpp>
#include <rveuler/errors.hpp>
#include <rveuler/force_models.hpp>
#include <rveuler/rv_euler_dynamics.hpp>
#include <rveuler/spherical_dynamics.hpp>
#include <rveuler/state_conversion.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace rveuler {

template <int N>
using StateVector = Eigen::Matrix<double, N, 1>;

template <int N>
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector<N>> states;

    std::size_t size() const { return times.size(); }
};

struct NoPostStep {
    template <int N>
    void operator()(StateVector<N>& /*y*/) const {}
};

/// Unit-normalizes both quaternion blocks of a packed rv-Euler vector.
struct RenormalizeRvEuler {
    void operator()(StateVector<10>& y) const {
        y.segment<4>(1).normalize();
        y.segment<4>(6).normalize();
    }
};

/// Classical RK4 with step (tf - t0) / steps. The observer sees every sample
/// (k, t_k, y_k), k = 0..steps. Derivative failures are rethrown as
/// PropagationError tagged with the start time of the failing step.
///
/// Increments are accumulated with Kahan compensation so that round-off in
/// long runs (e.g. a steadily growing longitude) does not grow with steps.
template <int N, class Deriv, class Observer, class PostStep = NoPostStep>
void rk4_integrate(const Deriv& f, const StateVector<N>& y0, double t0, double tf, std::size_t steps,
                   Observer&& observe, const PostStep& post = {}) {
    if (steps < 1)
        throw InvalidInput("rk4: number of steps must be at least 1");
    if (!(tf > t0))
        throw InvalidInput("rk4: final time must exceed initial time");
    const double h = (tf - t0) / static_cast<double>(steps);

    StateVector<N> y = y0;
    StateVector<N> carry = StateVector<N>::Zero();
    observe(std::size_t{0}, t0, y);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        try {
            const StateVector<N> k1 = f(t, y);
            const StateVector<N> k2 = f(t + 0.5 * h, StateVector<N>(y + 0.5 * h * k1));
            const StateVector<N> k3 = f(t + 0.5 * h, StateVector<N>(y + 0.5 * h * k2));
            const StateVector<N> k4 = f(t + h, StateVector<N>(y + h * k3));
            const StateVector<N> dy = StateVector<N>(h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) - carry;
            const StateVector<N> next = y + dy;
            carry = (next - y) - dy;
            y = next;
        } catch (const PropagationError&) {
            throw;
        } catch (const std::exception& e) {
            throw PropagationError(t, e.what());
        }
        post(y);
        if (!y.allFinite())
            throw PropagationError(t, "rk4: state became non-finite");
        observe(k + 1, k + 1 == steps ? tf : t0 + static_cast<double>(k + 1) * h, y);
    }
}

/// Stores every sample: steps + 1 of them.
template <int N, class Deriv, class PostStep = NoPostStep>
Trajectory<N> rk4_propagate(const Deriv& f, const StateVector<N>& y0, double t0, double tf, std::size_t steps,
                            const PostStep& post = {}) {
    Trajectory<N> traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    rk4_integrate<N>(
        f, y0, t0, tf, steps,
        [&](std::size_t, double t, const StateVector<N>& y) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        },
        post);
    return traj;
}

/// Packed derivative of the rv-Euler equations for a given force model.
template <ForceProvider F>
struct RvEulerOde {
    F provider;
    ObservationFrameSpec frame;
    double mass = 1.0;
    DynamicsOptions options;

    StateVector<10> operator()(double t, const StateVector<10>& y) const {
        return state_derivative(t, RvEulerState::from_vector(y), provider, frame, mass, options).to_vector();
    }
};

struct TwoBodySphericalOde {
    double mu = 398600.4418;

    StateVector<6> operator()(double /*t*/, const StateVector<6>& y) const {
        return two_body_spherical_rates(SphericalState::from_vector(y), mu).to_vector();
    }
};

template <ForceProvider F>
Trajectory<10> propagate_rv_euler(const RvEulerOde<F>& ode, const RvEulerState& s0, double t0, double tf,
                                  std::size_t steps, bool renormalize) {
    if (renormalize)
        return rk4_propagate<10>(ode, s0.to_vector(), t0, tf, steps, RenormalizeRvEuler{});
    return rk4_propagate<10>(ode, s0.to_vector(), t0, tf, steps);
}

inline Vec3 position_of(const StateVector<10>& y) {
    return cartesian_from_rv_euler(RvEulerState::from_vector(y)).r;
}

inline Vec3 position_of(const StateVector<6>& y) {
    const SphericalState s = SphericalState::from_vector(y);
    const double ct = std::cos(s.theta);
    return s.r * Vec3(ct * std::cos(s.phi), ct * std::sin(s.phi), std::sin(s.theta));
}

/// Parameters of the circular reference orbit: initial position on e1,
/// orbit plane tilted by the inclination about e1.
struct OrbitOracleParams {
    double radius = 6971.0;    // km
    double period = 5793.0;    // s
    double inclination = 0.0;  // rad
};

inline Vec3 analytic_circular_orbit(double t, const OrbitOracleParams& p) {
    const double a = 2.0 * kPi * t / p.period;
    return p.radius * (std::cos(a) * Vec3::UnitX() +
                       std::sin(a) * Vec3(0.0, std::cos(p.inclination), -std::sin(p.inclination)));
}

/// Circular-orbit reference for a Cartesian initial state with r on +e1 and v
/// perpendicular to r. The period follows from mu and the radius.
inline OrbitOracleParams orbit_oracle_from_initial_state(const CartesianState& c, double mu) {
    const double rn = c.r.norm();
    if (!(rn > 0.0) || (c.r / rn - Vec3::UnitX()).norm() > 1e-12)
        throw InvalidInput("circular orbit reference requires the initial position on +e1");
    const Vec3 w = c.v.normalized();
    if (std::abs(w.x()) > 1e-9)
        throw InvalidInput("circular orbit reference requires velocity perpendicular to position");
    OrbitOracleParams p;
    p.radius = rn;
    p.period = 2.0 * kPi * std::sqrt(rn * rn * rn / mu);
    p.inclination = std::atan2(-w.z(), w.y());
    return p;
}

struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> values; // km
    double max = 0.0;
};

/// e_r(t_k) = |r(t_k) - r*(t_k)| for every sample, plus the maximum.
template <class Oracle>
ErrorSeries position_error_series(const std::vector<double>& times, const std::vector<Vec3>& positions,
                                  const Oracle& oracle) {
    if (times.size() != positions.size())
        throw InvalidInput("position_error_series: time and position series differ in length");
    ErrorSeries e;
    e.times = times;
    e.values.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double err = (positions[k] - oracle(times[k])).norm();
        e.values.push_back(err);
        e.max = std::max(e.max, err);
    }
    return e;
}

template <int N, class Oracle>
ErrorSeries position_error_series(const Trajectory<N>& traj, const Oracle& oracle) {
    std::vector<Vec3> pos;
    pos.reserve(traj.size());
    for (const auto& y : traj.states)
        pos.push_back(position_of(y));
    return position_error_series(traj.times, pos, oracle);
}

enum class Formulation { RvEuler, Spherical };

inline std::string to_string(Formulation f) { return f == Formulation::RvEuler ? "rv-euler" : "spherical"; }

/// One two-body orbit setup shared by both formulations.
struct OrbitStudySetup {
    SphericalState initial;
    InitPolicy policy;
    double mu = 398600.4418;
    double t0 = 0.0;
    double tf = 0.0;             // one period when zero
    OrbitOracleParams oracle;
    bool renormalize = false;
};

struct ConvergenceRow {
    Formulation formulation = Formulation::RvEuler;
    std::size_t steps = 0;
    std::optional<double> e_max; // km; empty when the run failed
    std::string error;
};

/// Maximum position error over one run, without storing the trajectory.
inline double orbit_max_error(const OrbitStudySetup& setup, Formulation form, std::size_t steps) {
    const double tf = setup.tf > setup.t0 ? setup.tf : setup.t0 + setup.oracle.period;
    double e_max = 0.0;
    auto track = [&](std::size_t, double t, const auto& y) {
        e_max = std::max(e_max, (position_of(y) - analytic_circular_orbit(t, setup.oracle)).norm());
    };
    if (form == Formulation::RvEuler) {
        const RvEulerOde<TwoBodyGravity> ode{two_body_force_provider(setup.mu), ObservationFrameSpec::inertial(), 1.0,
                                             {}};
        const auto y0 = rv_euler_from_spherical(setup.initial, setup.policy).to_vector();
        if (setup.renormalize)
            rk4_integrate<10>(ode, y0, setup.t0, tf, steps, track, RenormalizeRvEuler{});
        else
            rk4_integrate<10>(ode, y0, setup.t0, tf, steps, track);
    } else {
        rk4_integrate<6>(TwoBodySphericalOde{setup.mu}, setup.initial.to_vector(), setup.t0, tf, steps, track);
    }
    return e_max;
}

/// One row per (formulation, N). Failed runs are recorded, not thrown. Rows
/// are evaluated on up to `threads` worker threads (0 = hardware concurrency).
inline std::vector<ConvergenceRow> convergence_study(const OrbitStudySetup& setup, const std::vector<std::size_t>& ns,
                                                     const std::vector<Formulation>& forms, unsigned threads = 1) {
    for (auto n : ns)
        if (n < 10 || n > 1'000'000)
            throw InvalidInput("convergence_study: step counts must lie in [10, 1e6], got " + std::to_string(n));

    std::vector<ConvergenceRow> rows;
    for (auto f : forms)
        for (auto n : ns)
            rows.push_back({f, n, std::nullopt, {}});

    auto run_row = [&](ConvergenceRow& row) {
        try {
            row.e_max = orbit_max_error(setup, row.formulation, row.steps);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    if (threads <= 1) {
        for (auto& row : rows)
            run_row(row);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < rows.size(); k = next++)
                run_row(rows[k]);
        });
    pool.clear();
    return rows;
}

/// `count` log-spaced integers over [lo, hi], duplicates removed.
inline std::vector<std::size_t> log_spaced_steps(std::size_t lo, std::size_t hi, std::size_t count) {
    std::vector<std::size_t> out;
    if (count == 0)
        return out;
    if (count == 1)
        return {lo};
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        const auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, x)));
        if (out.empty() || out.back() != n)
            out.push_back(n);
    }
    return out;
}

inline double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

} // namespace rveuler
