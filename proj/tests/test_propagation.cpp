#include "test_support.hpp"

#include <rveuler/propagation.hpp>

#include <gtest/gtest.h>

using namespace rveuler;

namespace {

constexpr double kMu = 398600.4418;

using Scalar = StateVector<1>;

struct Exponential {
    Scalar operator()(double, const Scalar& y) const { return y; }
};

double rk4_exp_error(std::size_t steps) {
    const auto traj = rk4_propagate<1>(Exponential{}, Scalar(1.0), 0.0, 1.0, steps);
    return std::abs(traj.states.back()(0) - std::exp(1.0));
}

OrbitStudySetup orbit_setup() {
    OrbitStudySetup s;
    s.initial = {6971.0, 0.0, 0.0, std::sqrt(kMu / 6971.0), 0.0, deg2rad(-172.223)};
    s.mu = kMu;
    s.oracle = orbit_oracle_from_initial_state(cartesian_from_spherical(s.initial), kMu);
    return s;
}

} // namespace

TEST(Rk4, ExponentialTenSteps) {
    const double e = rk4_exp_error(10);
    EXPECT_GT(e, 2.0e-6);
    EXPECT_LT(e, 2.1e-6);
}

TEST(Rk4, ErrorShrinksSixteenfoldPerHalving) {
    const double ratio = rk4_exp_error(20) / rk4_exp_error(40);
    EXPECT_NEAR(ratio, 16.0, 0.5);
}

TEST(Rk4, SampleTimesAndCount) {
    std::vector<double> times;
    rk4_integrate<1>(Exponential{}, Scalar(1.0), 2.0, 5.0, 7, [&](std::size_t k, double t, const Scalar&) {
        EXPECT_EQ(k, times.size());
        times.push_back(t);
    });
    ASSERT_EQ(times.size(), 8u);
    EXPECT_EQ(times.front(), 2.0);
    EXPECT_EQ(times.back(), 5.0);
    EXPECT_NEAR(times[3], 2.0 + 3.0 * 3.0 / 7.0, 1e-15);
}

TEST(Rk4, RejectsBadArguments) {
    auto noop = [](std::size_t, double, const Scalar&) {};
    EXPECT_THROW(rk4_integrate<1>(Exponential{}, Scalar(1.0), 0.0, 1.0, 0, noop), InvalidInput);
    EXPECT_THROW(rk4_integrate<1>(Exponential{}, Scalar(1.0), 1.0, 1.0, 5, noop), InvalidInput);
}

TEST(Rk4, DerivativeFailureCarriesStepTime) {
    const auto fails_late = [](double t, const Scalar& y) -> Scalar {
        if (t > 0.55)
            throw DomainError("boom");
        return y;
    };
    try {
        rk4_propagate<1>(fails_late, Scalar(1.0), 0.0, 1.0, 10);
        FAIL() << "expected PropagationError";
    } catch (const PropagationError& e) {
        EXPECT_NEAR(e.time(), 0.5, 1e-15);
    }
}

TEST(Rk4, NonFiniteStateIsReported) {
    const auto blows_up = [](double, const Scalar& y) -> Scalar { return Scalar(y(0) * 1e300); };
    EXPECT_THROW(rk4_propagate<1>(blows_up, Scalar(1.0), 0.0, 1.0, 1), PropagationError);
}

TEST(Rk4, PostStepHookRuns) {
    const auto traj = rk4_propagate<10>([](double, const StateVector<10>& y) -> StateVector<10> { return y; },
                                        StateVector<10>::Ones(), 0.0, 1.0, 3, RenormalizeRvEuler{});
    EXPECT_NEAR(traj.states.back().segment<4>(1).norm(), 1.0, 1e-15);
    EXPECT_NEAR(traj.states.back().segment<4>(6).norm(), 1.0, 1e-15);
    EXPECT_GT(traj.states.back()(0), 2.0);
}

TEST(CircularOracle, GeometryAndPeriod) {
    const OrbitOracleParams p = orbit_setup().oracle;
    EXPECT_NEAR(p.period, 5792.3341095930913, 1e-9);
    EXPECT_NEAR(rad2deg(p.inclination), 97.777, 1e-10);
    EXPECT_LT((analytic_circular_orbit(0.0, p) - Vec3(6971, 0, 0)).norm(), 1e-12);
    const Vec3 quarter = analytic_circular_orbit(p.period / 4.0, p);
    EXPECT_LT((quarter - 6971.0 * Vec3(0, std::cos(p.inclination), -std::sin(p.inclination))).norm(), 1e-9);
    EXPECT_LT((analytic_circular_orbit(p.period, p) - Vec3(6971, 0, 0)).norm(), 1e-9);
}

TEST(CircularOracle, InitialVelocityIsTimeDerivative) {
    const OrbitStudySetup s = orbit_setup();
    const CartesianState c = cartesian_from_spherical(s.initial);
    const double h = 1e-3;
    const Vec3 fd = (analytic_circular_orbit(h, s.oracle) - analytic_circular_orbit(-h, s.oracle)) / (2 * h);
    EXPECT_LT((fd - c.v).norm(), 1e-8);
}

TEST(CircularOracle, RequiresPositionOnE1AndPerpendicularVelocity) {
    EXPECT_THROW(orbit_oracle_from_initial_state({Vec3(0, 7000, 0), Vec3(7, 0, 0)}, kMu), InvalidInput);
    EXPECT_THROW(orbit_oracle_from_initial_state({Vec3(7000, 0, 0), Vec3(1, 7, 0)}, kMu), InvalidInput);
}

TEST(ErrorSeries, MaximumAndLengthCheck) {
    const ErrorSeries e = position_error_series({0.0, 1.0}, {Vec3(1, 0, 0), Vec3(0, 3, 4)},
                                                [](double) { return Vec3::Zero(); });
    EXPECT_EQ(e.values, (std::vector<double>{1.0, 5.0}));
    EXPECT_EQ(e.max, 5.0);
    EXPECT_THROW(position_error_series({0.0}, {}, [](double) { return Vec3::Zero(); }), InvalidInput);
}

TEST(OrbitPropagation, TrajectoryHasStepsPlusOneSamples) {
    const OrbitStudySetup s = orbit_setup();
    const RvEulerOde<TwoBodyGravity> ode{two_body_force_provider(kMu), {}, 1.0, {}};
    const auto traj = propagate_rv_euler(ode, rv_euler_from_spherical(s.initial), 0.0, s.oracle.period, 123, false);
    EXPECT_EQ(traj.size(), 124u);
    EXPECT_EQ(traj.times.back(), s.oracle.period);
    const ErrorSeries e = position_error_series(traj, [&](double t) { return analytic_circular_orbit(t, s.oracle); });
    EXPECT_EQ(e.values.front(), 0.0);
    EXPECT_LT(e.max, 1e-2);
}

TEST(OrbitPropagation, SphericalCoarseRunIsFinite) {
    const OrbitStudySetup s = orbit_setup();
    const double e = orbit_max_error(s, Formulation::Spherical, 10);
    EXPECT_TRUE(std::isfinite(e));
    EXPECT_GT(e, 1000.0);
}

TEST(ConvergenceStudy, SingleStepCountGivesOneRowPerFormulation) {
    const auto rows = convergence_study(orbit_setup(), {1000}, {Formulation::RvEuler, Formulation::Spherical});
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_TRUE(rows[0].e_max && rows[1].e_max);
    EXPECT_EQ(rows[0].formulation, Formulation::RvEuler);
    EXPECT_GE(*rows[1].e_max / *rows[0].e_max, 100.0);
}

TEST(ConvergenceStudy, ThreadCountDoesNotChangeResults) {
    const std::vector<std::size_t> ns{10, 50, 200};
    const std::vector<Formulation> forms{Formulation::RvEuler, Formulation::Spherical};
    const auto serial = convergence_study(orbit_setup(), ns, forms, 1);
    const auto parallel = convergence_study(orbit_setup(), ns, forms, 3);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].steps, parallel[i].steps);
        EXPECT_EQ(serial[i].e_max, parallel[i].e_max);
    }
}

TEST(ConvergenceStudy, StepCountRange) {
    EXPECT_THROW(convergence_study(orbit_setup(), {9}, {Formulation::RvEuler}), InvalidInput);
    EXPECT_THROW(convergence_study(orbit_setup(), {1'000'001}, {Formulation::RvEuler}), InvalidInput);
}

TEST(ConvergenceStudy, FailedRowsAreRecorded) {
    OrbitStudySetup s = orbit_setup();
    s.initial.theta = kHalfPi; // starts on the pole
    const auto rows = convergence_study(s, {10}, {Formulation::Spherical});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].e_max);
    EXPECT_FALSE(rows[0].error.empty());
}

TEST(LogSpacedSteps, DefaultSweep) {
    const auto ns = log_spaced_steps(10, 100000, 30);
    EXPECT_EQ(ns.size(), 30u);
    EXPECT_EQ(ns.front(), 10u);
    EXPECT_EQ(ns.back(), 100000u);
    EXPECT_TRUE(std::is_sorted(ns.begin(), ns.end()));
    EXPECT_EQ(log_spaced_steps(10, 10, 1), (std::vector<std::size_t>{10}));
    EXPECT_NEAR(observed_order(16.0, 1.0), 4.0, 1e-15);
}
