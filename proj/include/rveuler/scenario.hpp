// Scenario runners behind the rveuler CLI: orbit propagation against the
// circular-orbit reference, step-count convergence sweeps, entry forward
// simulation with path-constraint evaluation, and formulation comparison.
#pragma once

#include <rveuler/constants.hpp>
#include <rveuler/errors.hpp>
#include <rveuler/force_models.hpp>
#include <rveuler/propagation.hpp>
#include <rveuler/rv_euler_dynamics.hpp>
#include <rveuler/scenario_config.hpp>
#include <rveuler/spherical_dynamics.hpp>
#include <rveuler/state_conversion.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rveuler {

struct RunFailure {
    double time = 0.0;
    std::string message;
};

/// One formulation's samples. Exactly one of rv_states / sph_states is filled.
struct FormulationRun {
    Formulation formulation = Formulation::RvEuler;
    std::size_t steps = 0;
    std::vector<double> times;
    std::vector<StateVector<10>> rv_states;
    std::vector<StateVector<6>> sph_states;
    std::vector<CartesianState> cartesian;
    std::optional<ErrorSeries> error;
    std::optional<RunFailure> failure;
};

struct ConstraintSample {
    double t = 0.0;
    double aero_load = 0.0; // sqrt(L^2 + D^2) / m, km/s^2
    double q = 0.0;         // kg/(km s^2)
    double alpha = 0.0;     // rad
    double sigma = 0.0;     // rad
    double u_alpha = 0.0;   // rad/s
    double u_sigma = 0.0;   // rad/s
};

/// Largest violation of each path constraint over the run (zero = satisfied).
struct ConstraintViolations {
    double aero_load = 0.0;
    double q_min = 0.0;
    double alpha_low = 0.0;
    double alpha_high = 0.0;
    double u_alpha = 0.0;
    double u_sigma = 0.0;
};

struct EntryDiagnostics {
    double t_final = 0.0;
    double altitude = 0.0;
    double v = 0.0;
    double eps_b1 = 0.0;
    double eta_b = 0.0;
    double sin_gamma = 0.0;
    std::array<double, 3> target_residual{}; // terminal position direction minus target direction
};

struct DifferenceSeries {
    std::vector<double> times;
    std::vector<Vec3> position;
    std::vector<Vec3> velocity;
    double max_position = 0.0;
    double max_velocity = 0.0;
};

struct RunReport {
    ScenarioKind kind = ScenarioKind::Orbit;
    std::vector<FormulationRun> runs;
    std::optional<OrbitOracleParams> oracle;
    std::string oracle_note;
    std::vector<ConstraintSample> constraints;
    std::optional<ConstraintViolations> violations;
    std::optional<EntryDiagnostics> entry;
    std::optional<DifferenceSeries> difference;
    std::vector<ConvergenceRow> convergence;

    const FormulationRun* find(Formulation f) const {
        for (const auto& r : runs)
            if (r.formulation == f)
                return &r;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Setup
// ---------------------------------------------------------------------------

struct ResolvedInitial {
    CartesianState cartesian;
    RvEulerState rv;
    std::optional<SphericalState> spherical;
    std::string spherical_note;
};

inline InitPolicy resolve_policy(const ScenarioConfig& c) {
    if (!c.policy.custom)
        return InitPolicy::h_aligned();
    try {
        return InitPolicy::custom(EulerParams::from_array(c.policy.ep_a));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("policy.ep_a: ") + e.what());
    }
}

inline ResolvedInitial resolve_initial(const ScenarioConfig& c) {
    ResolvedInitial out;
    const InitPolicy policy = resolve_policy(c);
    try {
        if (const auto* s = std::get_if<SphericalInput>(&c.initial)) {
            SphericalState sph{s->r, deg2rad(s->lon_deg), deg2rad(s->lat_deg),
                               s->v ? *s->v : std::sqrt(c.constants.mu / s->r), deg2rad(s->gamma_deg),
                               deg2rad(s->psi_deg)};
            out.spherical = sph;
            out.cartesian = cartesian_from_spherical(sph);
            out.rv = rv_euler_from_cartesian(out.cartesian, policy);
        } else if (const auto* x = std::get_if<CartesianInput>(&c.initial)) {
            out.cartesian = {Vec3(x->r[0], x->r[1], x->r[2]), Vec3(x->v[0], x->v[1], x->v[2])};
            out.rv = rv_euler_from_cartesian(out.cartesian, policy);
        } else {
            const auto& e = std::get<RvEulerInput>(c.initial);
            out.rv = {e.r, EulerParams::from_array(e.ep_a), e.v, EulerParams::from_array(e.ep_b)};
            (void)dcm_from_euler_params(out.rv.ep_a);
            (void)dcm_from_euler_params(out.rv.ep_b);
            out.cartesian = cartesian_from_rv_euler(out.rv);
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("initial_state: ") + e.what());
    }
    if (!out.spherical) {
        try {
            out.spherical = spherical_from_cartesian(out.cartesian);
        } catch (const InvalidInput& e) {
            out.spherical_note = e.what();
        }
    }
    return out;
}

inline std::vector<Formulation> formulations_of(FormulationChoice f) {
    switch (f) {
    case FormulationChoice::RvEuler: return {Formulation::RvEuler};
    case FormulationChoice::Spherical: return {Formulation::Spherical};
    case FormulationChoice::Both: return {Formulation::RvEuler, Formulation::Spherical};
    }
    return {Formulation::RvEuler};
}

inline double circular_period(double r, double mu) { return 2.0 * kPi * std::sqrt(r * r * r / mu); }

/// Circular-orbit reference if the initial state is a circular orbit starting
/// on +e1; otherwise empty with the reason in `note`.
inline std::optional<OrbitOracleParams> orbit_oracle_for(const CartesianState& c, double mu, std::string& note) {
    const double v_circ = std::sqrt(mu / c.r.norm());
    if (std::abs(c.v.norm() - v_circ) > 1e-9 * v_circ) {
        note = "initial speed is not the circular speed; no analytic reference";
        return std::nullopt;
    }
    try {
        return orbit_oracle_from_initial_state(c, mu);
    } catch (const InvalidInput& e) {
        note = e.what();
        return std::nullopt;
    }
}

namespace detail {

struct SampleSink {
    FormulationRun& run;

    void operator()(std::size_t, double t, const StateVector<10>& y) {
        run.times.push_back(t);
        run.rv_states.push_back(y);
        run.cartesian.push_back(cartesian_from_rv_euler(RvEulerState::from_vector(y)));
    }

    void operator()(std::size_t, double t, const StateVector<6>& y) {
        run.times.push_back(t);
        run.sph_states.push_back(y);
        run.cartesian.push_back(cartesian_from_spherical(SphericalState::from_vector(y)));
    }
};

template <int N, class Ode>
void integrate_into(FormulationRun& run, const Ode& ode, const StateVector<N>& y0, double t0, double tf,
                    std::size_t steps, bool renormalize = false) {
    run.steps = steps;
    run.times.reserve(steps + 1);
    run.cartesian.reserve(steps + 1);
    SampleSink sink{run};
    try {
        if constexpr (N == 10) {
            run.rv_states.reserve(steps + 1);
            if (renormalize)
                rk4_integrate<10>(ode, y0, t0, tf, steps, sink, RenormalizeRvEuler{});
            else
                rk4_integrate<10>(ode, y0, t0, tf, steps, sink);
        } else {
            run.sph_states.reserve(steps + 1);
            rk4_integrate<N>(ode, y0, t0, tf, steps, sink);
        }
    } catch (const PropagationError& e) {
        run.failure = RunFailure{e.time(), e.what()};
    } catch (const std::exception& e) {
        run.failure = RunFailure{run.times.empty() ? t0 : run.times.back(), e.what()};
    }
}

inline void attach_error(FormulationRun& run, const OrbitOracleParams& oracle) {
    std::vector<Vec3> pos;
    pos.reserve(run.cartesian.size());
    for (const auto& c : run.cartesian)
        pos.push_back(c.r);
    run.error = position_error_series(run.times, pos, [&](double t) { return analytic_circular_orbit(t, oracle); });
}

inline FormulationRun two_body_run(Formulation form, const ResolvedInitial& init, double mu, double t0, double tf,
                                   std::size_t steps, bool renormalize) {
    FormulationRun run;
    run.formulation = form;
    if (form == Formulation::RvEuler) {
        const RvEulerOde<TwoBodyGravity> ode{two_body_force_provider(mu), ObservationFrameSpec::inertial(), 1.0, {}};
        integrate_into<10>(run, ode, init.rv.to_vector(), t0, tf, steps, renormalize);
    } else if (init.spherical) {
        integrate_into<6>(run, TwoBodySphericalOde{mu}, init.spherical->to_vector(), t0, tf, steps);
    } else {
        run.steps = steps;
        run.failure = RunFailure{t0, "spherical initial state unavailable: " + init.spherical_note};
    }
    return run;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

/// Two-body propagation over one period (or the configured interval) with the
/// position error against the circular reference when it applies.
inline RunReport run_orbit(const ScenarioConfig& c) {
    RunReport rep;
    rep.kind = ScenarioKind::Orbit;
    const ResolvedInitial init = resolve_initial(c);
    const double mu = c.constants.mu;
    rep.oracle = orbit_oracle_for(init.cartesian, mu, rep.oracle_note);
    const double t0 = c.integrator.t0;
    const double tf = c.integrator.tf ? *c.integrator.tf : t0 + circular_period(init.cartesian.r.norm(), mu);

    for (Formulation f : formulations_of(c.formulation)) {
        FormulationRun run = detail::two_body_run(f, init, mu, t0, tf, c.integrator.steps, c.integrator.renormalize);
        if (rep.oracle)
            detail::attach_error(run, *rep.oracle);
        rep.runs.push_back(std::move(run));
    }
    return rep;
}

/// Default sweep: 30 log-spaced step counts over [10, 1e5].
inline std::vector<std::size_t> default_convergence_steps() { return log_spaced_steps(10, 100000, 30); }

inline RunReport run_convergence(const ScenarioConfig& c) {
    RunReport rep;
    rep.kind = ScenarioKind::Convergence;
    const ResolvedInitial init = resolve_initial(c);
    rep.oracle = orbit_oracle_for(init.cartesian, c.constants.mu, rep.oracle_note);
    if (!rep.oracle)
        throw ConfigError("initial_state: convergence study needs a circular orbit starting on +e1 (" +
                          rep.oracle_note + ")");
    if (!init.spherical && c.formulation != FormulationChoice::RvEuler)
        throw ConfigError("initial_state: spherical formulation unavailable (" + init.spherical_note + ")");

    OrbitStudySetup setup;
    setup.initial = *init.spherical;
    setup.policy = resolve_policy(c);
    setup.mu = c.constants.mu;
    setup.t0 = c.integrator.t0;
    setup.tf = c.integrator.tf ? *c.integrator.tf : setup.t0 + rep.oracle->period;
    setup.oracle = *rep.oracle;
    setup.renormalize = c.integrator.renormalize;

    const auto ns = c.integrator.steps_list.empty() ? default_convergence_steps() : c.integrator.steps_list;
    try {
        rep.convergence = convergence_study(setup, ns, formulations_of(c.formulation), c.integrator.threads);
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("integrator.steps_list: ") + e.what());
    }
    return rep;
}

/// Spherical entry equations driven by the same aerodynamic model. The bank
/// angle is converted from the b2-referenced convention by subtracting pi,
/// which is exact for frames initialized with the h-aligned policy while b3
/// stays horizontal.
struct EntrySphericalOde {
    EntryForces forces;
    double mass = 1.0;
    double omega_e = 0.0;

    StateVector<6> operator()(double t, const StateVector<6>& y) const {
        const SphericalState s = SphericalState::from_vector(y);
        const AeroSample a = forces.sample(t, s.r, s.v);
        const SphericalForces f{a.drag / mass, a.lift / mass, a.sigma - kPi};
        return entry_spherical_rates(s, f, forces.mu, omega_e).to_vector();
    }
};

inline EntryForces entry_forces_from(const ScenarioConfig& c) {
    const EntryConfig& e = c.entry;
    AeroModel aero;
    aero.rho0 = e.aero.rho0;
    aero.scale_height = e.aero.scale_height;
    aero.planet_radius = c.constants.radius;
    aero.h_floor = e.aero.h_floor;
    aero.area = e.aero.area;
    aero.cl_alpha = e.aero.cl_alpha;
    aero.cd0 = e.aero.cd0;
    aero.k = e.aero.k;
    auto to_rad = [](std::vector<std::pair<double, double>> knots) {
        for (auto& k : knots)
            k.second = deg2rad(k.second);
        return PiecewiseLinear(std::move(knots));
    };
    return entry_force_provider(aero, c.constants.mu, to_rad(e.alpha_deg), to_rad(e.sigma_deg));
}

inline ConstraintSample constraint_sample(const EntryForces& forces, double mass, double t, double r, double v) {
    ConstraintSample cs;
    cs.t = t;
    cs.alpha = forces.alpha_profile(t);
    cs.sigma = forces.sigma_profile(t);
    cs.u_alpha = forces.alpha_profile.slope(t);
    cs.u_sigma = forces.sigma_profile.slope(t);
    try {
        const AeroSample a = forces.sample(t, r, v);
        cs.q = a.q;
        cs.aero_load = std::hypot(a.lift, a.drag) / mass;
    } catch (const DomainError&) {
        cs.q = std::numeric_limits<double>::quiet_NaN();
        cs.aero_load = std::numeric_limits<double>::quiet_NaN();
    }
    return cs;
}

inline ConstraintViolations evaluate_violations(const std::vector<ConstraintSample>& samples, const LimitsConfig& lim) {
    ConstraintViolations v;
    const double alpha_max = deg2rad(lim.alpha_max_deg);
    const double ua_max = deg2rad(lim.u_alpha_max_deg);
    const double us_max = deg2rad(lim.u_sigma_max_deg);
    for (const auto& s : samples) {
        if (std::isfinite(s.aero_load))
            v.aero_load = std::max(v.aero_load, s.aero_load - lim.a_max);
        if (std::isfinite(s.q))
            v.q_min = std::max(v.q_min, lim.q_min - s.q);
        v.alpha_low = std::max(v.alpha_low, -s.alpha);
        v.alpha_high = std::max(v.alpha_high, s.alpha - alpha_max);
        v.u_alpha = std::max(v.u_alpha, std::abs(s.u_alpha) - ua_max);
        v.u_sigma = std::max(v.u_sigma, std::abs(s.u_sigma) - us_max);
    }
    return v;
}

inline EntryDiagnostics entry_diagnostics(double t, const RvEulerState& s, const ScenarioConfig& c) {
    EntryDiagnostics d;
    d.t_final = t;
    d.altitude = s.r - c.constants.radius;
    d.v = s.v;
    d.eps_b1 = s.ep_b.eps.x();
    d.eta_b = s.ep_b.eta;
    d.sin_gamma = 1.0 - 2.0 * (s.ep_b.eps.y() * s.ep_b.eps.y() + s.ep_b.eps.z() * s.ep_b.eps.z());
    const double e1 = s.ep_a.eps.x(), e2 = s.ep_a.eps.y(), e3 = s.ep_a.eps.z(), h = s.ep_a.eta;
    const double lon = deg2rad(c.entry.target_lon_deg), lat = deg2rad(c.entry.target_lat_deg);
    d.target_residual = {1.0 - 2.0 * (e2 * e2 + e3 * e3) - std::cos(lat) * std::cos(lon),
                         2.0 * (e1 * e2 + e3 * h) - std::cos(lat) * std::sin(lon),
                         2.0 * (e1 * e3 - e2 * h) - std::sin(lat)};
    return d;
}

/// Forward simulation of lift/drag/gravity flight with prescribed angle of
/// attack and bank profiles, observed in the rotating planet frame.
inline RunReport run_entry(const ScenarioConfig& c) {
    RunReport rep;
    rep.kind = ScenarioKind::Entry;
    const ResolvedInitial init = resolve_initial(c);
    const double t0 = c.integrator.t0;
    if (!c.integrator.tf)
        throw ConfigError("integrator.tf: required for the entry scenario");
    const double tf = *c.integrator.tf;

    EntryForces forces;
    try {
        forces = entry_forces_from(c);
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("entry: ") + e.what());
    }
    if (!forces.alpha_profile.covers(t0, tf))
        throw ConfigError("entry.alpha_deg: profile does not cover the simulation interval");
    if (!forces.sigma_profile.covers(t0, tf))
        throw ConfigError("entry.sigma_deg: profile does not cover the simulation interval");

    const double omega_e = c.entry.rotating_frame ? c.constants.omega : 0.0;
    const double mass = c.entry.mass;

    for (Formulation f : formulations_of(c.formulation)) {
        FormulationRun run;
        run.formulation = f;
        if (f == Formulation::RvEuler) {
            const RvEulerOde<EntryForces> ode{forces, ObservationFrameSpec::spinning_about_e3(omega_e), mass,
                                              DynamicsOptions{c.entry.v_min}};
            detail::integrate_into<10>(run, ode, init.rv.to_vector(), t0, tf, c.integrator.steps,
                                       c.integrator.renormalize);
        } else if (init.spherical) {
            detail::integrate_into<6>(run, EntrySphericalOde{forces, mass, omega_e}, init.spherical->to_vector(), t0,
                                      tf, c.integrator.steps);
        } else {
            run.steps = c.integrator.steps;
            run.failure = RunFailure{t0, "spherical initial state unavailable: " + init.spherical_note};
        }
        rep.runs.push_back(std::move(run));
    }

    // Constraints and terminal diagnostics come from the leading formulation.
    const FormulationRun& lead = rep.runs.front();
    for (std::size_t k = 0; k < lead.times.size(); ++k) {
        double r = 0.0, v = 0.0;
        if (lead.formulation == Formulation::RvEuler) {
            r = lead.rv_states[k](0);
            v = lead.rv_states[k](5);
        } else {
            r = lead.sph_states[k](0);
            v = lead.sph_states[k](3);
        }
        rep.constraints.push_back(constraint_sample(forces, mass, lead.times[k], r, v));
    }
    rep.violations = evaluate_violations(rep.constraints, c.entry.limits);
    if (lead.formulation == Formulation::RvEuler && !lead.rv_states.empty())
        rep.entry = entry_diagnostics(lead.times.back(), RvEulerState::from_vector(lead.rv_states.back()), c);
    return rep;
}

inline DifferenceSeries difference_series(const FormulationRun& a, const FormulationRun& b) {
    DifferenceSeries d;
    const std::size_t n = std::min(a.cartesian.size(), b.cartesian.size());
    for (std::size_t k = 0; k < n; ++k) {
        d.times.push_back(a.times[k]);
        d.position.push_back(a.cartesian[k].r - b.cartesian[k].r);
        d.velocity.push_back(a.cartesian[k].v - b.cartesian[k].v);
        d.max_position = std::max(d.max_position, d.position.back().norm());
        d.max_velocity = std::max(d.max_velocity, d.velocity.back().norm());
    }
    return d;
}

/// Propagates two legs of the same two-body problem and differences them in
/// Cartesian coordinates. `both` runs rv-Euler against spherical; a single
/// formulation runs it against itself.
inline RunReport run_compare(const ScenarioConfig& c) {
    RunReport rep;
    rep.kind = ScenarioKind::Compare;
    const ResolvedInitial init = resolve_initial(c);
    const double mu = c.constants.mu;
    rep.oracle = orbit_oracle_for(init.cartesian, mu, rep.oracle_note);
    const double t0 = c.integrator.t0;
    const double tf = c.integrator.tf ? *c.integrator.tf : t0 + circular_period(init.cartesian.r.norm(), mu);

    std::vector<Formulation> legs = formulations_of(c.formulation);
    if (legs.size() == 1)
        legs.push_back(legs.front());
    for (Formulation f : legs) {
        FormulationRun run = detail::two_body_run(f, init, mu, t0, tf, c.integrator.steps, c.integrator.renormalize);
        if (rep.oracle)
            detail::attach_error(run, *rep.oracle);
        rep.runs.push_back(std::move(run));
    }
    rep.difference = difference_series(rep.runs[0], rep.runs[1]);
    return rep;
}

inline RunReport run_scenario(const ScenarioConfig& c) {
    switch (c.kind) {
    case ScenarioKind::Orbit: return run_orbit(c);
    case ScenarioKind::Convergence: return run_convergence(c);
    case ScenarioKind::Entry: return run_entry(c);
    case ScenarioKind::Compare: return run_compare(c);
    }
    return run_orbit(c);
}

/// A run failure that should turn into a numerical-error exit status. In
/// `both` mode the spherical leg is a comparison and its failure is data.
inline const RunFailure* blocking_failure(const RunReport& rep, const ScenarioConfig& c) {
    for (const auto& run : rep.runs) {
        if (!run.failure)
            continue;
        if (c.formulation == FormulationChoice::Both && run.formulation == Formulation::Spherical)
            continue;
        return &*run.failure;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace csv {

inline std::string num(double x) {
    if (std::isnan(x))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline constexpr const char* kRvEulerTrajectoryHeader =
    "t,r,v,epsA1,epsA2,epsA3,etaA,epsB1,epsB2,epsB3,etaB,x,y,z,vx,vy,vz";
inline constexpr const char* kSphericalTrajectoryHeader = "t,r,lon_deg,lat_deg,v,gamma_deg,psi_deg,x,y,z,vx,vy,vz";
inline constexpr const char* kErrorHeader = "t,e_r";
inline constexpr const char* kConstraintsHeader = "t,aero_load,q,alpha,sigma";
inline constexpr const char* kDifferenceHeader = "t,dx,dy,dz,d_pos,dvx,dvy,dvz,d_vel";
inline constexpr const char* kConvergenceHeader =
    "N,e_r_max_rv_euler,e_r_max_spherical,ratio,status_rv_euler,status_spherical";

inline void write_trajectory(std::ostream& os, const FormulationRun& run) {
    if (run.formulation == Formulation::RvEuler) {
        os << kRvEulerTrajectoryHeader << '\n';
        for (std::size_t k = 0; k < run.times.size(); ++k) {
            const auto& y = run.rv_states[k];
            const auto& c = run.cartesian[k];
            os << num(run.times[k]) << ',' << num(y(0)) << ',' << num(y(5));
            for (int i : {1, 2, 3, 4, 6, 7, 8, 9})
                os << ',' << num(y(i));
            for (int i = 0; i < 3; ++i)
                os << ',' << num(c.r(i));
            for (int i = 0; i < 3; ++i)
                os << ',' << num(c.v(i));
            os << '\n';
        }
    } else {
        os << kSphericalTrajectoryHeader << '\n';
        for (std::size_t k = 0; k < run.times.size(); ++k) {
            const auto& y = run.sph_states[k];
            const auto& c = run.cartesian[k];
            os << num(run.times[k]) << ',' << num(y(0)) << ',' << num(rad2deg(y(1))) << ',' << num(rad2deg(y(2)))
               << ',' << num(y(3)) << ',' << num(rad2deg(y(4))) << ',' << num(rad2deg(y(5)));
            for (int i = 0; i < 3; ++i)
                os << ',' << num(c.r(i));
            for (int i = 0; i < 3; ++i)
                os << ',' << num(c.v(i));
            os << '\n';
        }
    }
}

inline void write_error(std::ostream& os, const ErrorSeries& e) {
    os << kErrorHeader << '\n';
    for (std::size_t k = 0; k < e.times.size(); ++k)
        os << num(e.times[k]) << ',' << num(e.values[k]) << '\n';
}

/// alpha and sigma in degrees.
inline void write_constraints(std::ostream& os, const std::vector<ConstraintSample>& samples) {
    os << kConstraintsHeader << '\n';
    for (const auto& s : samples)
        os << num(s.t) << ',' << num(s.aero_load) << ',' << num(s.q) << ',' << num(rad2deg(s.alpha)) << ','
           << num(rad2deg(s.sigma)) << '\n';
}

inline void write_difference(std::ostream& os, const DifferenceSeries& d) {
    os << kDifferenceHeader << '\n';
    for (std::size_t k = 0; k < d.times.size(); ++k) {
        const Vec3& p = d.position[k];
        const Vec3& v = d.velocity[k];
        os << num(d.times[k]) << ',' << num(p.x()) << ',' << num(p.y()) << ',' << num(p.z()) << ',' << num(p.norm())
           << ',' << num(v.x()) << ',' << num(v.y()) << ',' << num(v.z()) << ',' << num(v.norm()) << '\n';
    }
}

inline std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

inline void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    std::vector<std::size_t> ns;
    for (const auto& r : rows)
        if (std::find(ns.begin(), ns.end(), r.steps) == ns.end())
            ns.push_back(r.steps);
    std::sort(ns.begin(), ns.end());
    os << kConvergenceHeader << '\n';
    for (std::size_t n : ns) {
        const ConvergenceRow* rv = nullptr;
        const ConvergenceRow* sp = nullptr;
        for (const auto& r : rows)
            if (r.steps == n)
                (r.formulation == Formulation::RvEuler ? rv : sp) = &r;
        auto cell = [](const ConvergenceRow* r) { return r && r->e_max ? num(*r->e_max) : std::string(); };
        auto status = [](const ConvergenceRow* r) {
            if (!r)
                return std::string();
            return r->e_max ? std::string("ok") : sanitize(r->error);
        };
        std::string ratio;
        if (rv && sp && rv->e_max && sp->e_max && *rv->e_max > 0.0)
            ratio = num(*sp->e_max / *rv->e_max);
        os << n << ',' << cell(rv) << ',' << cell(sp) << ',' << ratio << ',' << status(rv) << ',' << status(sp)
           << '\n';
    }
}

} // namespace csv

inline nlohmann::json summary_json(const RunReport& rep, const ScenarioConfig& c) {
    using nlohmann::json;
    json s;
    s["scenario"] = to_string(rep.kind);
    s["formulation"] = to_string(c.formulation);
    s["steps"] = c.integrator.steps;
    if (rep.oracle)
        s["oracle"] = {{"radius_km", rep.oracle->radius},
                       {"period_s", rep.oracle->period},
                       {"inclination_deg", rad2deg(rep.oracle->inclination)}};
    else if (!rep.oracle_note.empty())
        s["oracle"] = {{"unavailable", rep.oracle_note}};
    json runs = json::array();
    for (const auto& r : rep.runs) {
        json jr = {{"formulation", to_string(r.formulation)}, {"samples", r.times.size()}, {"steps", r.steps}};
        if (r.error)
            jr["e_r_max_km"] = r.error->max;
        if (r.failure)
            jr["failure"] = {{"time_s", r.failure->time}, {"message", r.failure->message}};
        runs.push_back(jr);
    }
    s["runs"] = runs;
    if (rep.violations) {
        const auto& v = *rep.violations;
        s["constraint_max_violation"] = {{"aero_load", v.aero_load}, {"q_min", v.q_min},
                                         {"alpha_low", v.alpha_low}, {"alpha_high", v.alpha_high},
                                         {"u_alpha", v.u_alpha},     {"u_sigma", v.u_sigma}};
    }
    if (rep.entry) {
        const auto& d = *rep.entry;
        s["terminal"] = {{"t_s", d.t_final},          {"altitude_km", d.altitude}, {"v_km_s", d.v},
                         {"epsB1", d.eps_b1},         {"etaB", d.eta_b},           {"sin_gamma", d.sin_gamma},
                         {"target_residual", d.target_residual}};
    }
    if (rep.difference)
        s["difference"] = {{"max_position_km", rep.difference->max_position},
                           {"max_velocity_km_s", rep.difference->max_velocity}};
    if (!rep.convergence.empty()) {
        json rows = json::array();
        for (const auto& r : rep.convergence) {
            json jr = {{"formulation", to_string(r.formulation)}, {"N", r.steps}};
            if (r.e_max)
                jr["e_r_max_km"] = *r.e_max;
            else
                jr["error"] = r.error;
            rows.push_back(jr);
        }
        s["convergence"] = rows;
    }
    return s;
}

inline std::string file_tag(Formulation f) { return f == Formulation::RvEuler ? "rv_euler" : "spherical"; }

/// Writes every series of the report into `dir` and returns the file names.
inline std::vector<std::string> write_report(const RunReport& rep, const ScenarioConfig& c,
                                             const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        std::ofstream os(dir / name);
        if (!os)
            throw std::runtime_error("cannot write " + (dir / name).string());
        written.push_back(name);
        return os;
    };

    // compare writes two legs that may share a formulation
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const auto& run = rep.runs[i];
        std::string tag = file_tag(run.formulation);
        if (rep.kind == ScenarioKind::Compare && rep.runs.size() == 2 &&
            rep.runs[0].formulation == rep.runs[1].formulation)
            tag += i == 0 ? "_a" : "_b";
        {
            auto os = open("trajectory_" + tag + ".csv");
            csv::write_trajectory(os, run);
        }
        if (run.error) {
            auto os = open("error_" + tag + ".csv");
            csv::write_error(os, *run.error);
        }
    }
    if (rep.kind == ScenarioKind::Entry) {
        auto os = open("constraints.csv");
        csv::write_constraints(os, rep.constraints);
    }
    if (rep.difference) {
        auto os = open("difference.csv");
        csv::write_difference(os, *rep.difference);
    }
    if (!rep.convergence.empty()) {
        auto os = open("convergence.csv");
        csv::write_convergence(os, rep.convergence);
    }
    {
        auto os = open("summary.json");
        os << summary_json(rep, c).dump(2) << '\n';
    }
    return written;
}

} // namespace rveuler
