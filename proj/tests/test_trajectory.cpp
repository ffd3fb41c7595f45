#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oscunruh/trajectory.hpp"

using namespace oscunruh;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double omega = 2.0 * pi * 300e3;
constexpr double length = 1.0;

TrajectorySpec oscillating(double u) {
    return TrajectorySpec::oscillatory_dimensionless(length, 2.0 * pi, u, omega);
}

}  // namespace

TEST(Trajectory, WaveNumberAndDimensionlessParameters) {
    const auto t = TrajectorySpec::oscillatory(2.0, 1.0, 0.1, omega);
    EXPECT_DOUBLE_EQ(t.wave_number(), 2.0 * pi);
    EXPECT_DOUBLE_EQ(t.u_bar(), 2.0 * pi);  // centre of the cavity
    EXPECT_NEAR(t.u(), 0.2 * pi, 1e-15);
}

TEST(Trajectory, OscillatoryPosition) {
    const auto t = TrajectorySpec::oscillatory(length, 0.5, 0.01, omega);
    EXPECT_DOUBLE_EQ(t.position(0.0), 0.5);
    EXPECT_NEAR(t.position(pi / (2.0 * omega)), 0.51, 1e-15);
}

TEST(Trajectory, StaticPosition) {
    const auto t = TrajectorySpec::static_at(length, 0.3);
    for (double time : {0.0, 1e-6, 3.7e-3}) EXPECT_DOUBLE_EQ(t.position(time), 0.3);
}

TEST(Trajectory, InertialPosition) {
    const auto t = TrajectorySpec::inertial(length, 0.25);
    EXPECT_DOUBLE_EQ(t.position(2e-9), 0.25 * speed_of_light * 2e-9);
}

TEST(Modulation, CentreWithoutOscillationHasNoCoupling) {
    const auto t = oscillating(0.0);
    for (double time = 0.0; time < 1e-4; time += 3.3e-7) EXPECT_NEAR(t.modulation(time), 0.0, 1e-15);
}

TEST(Modulation, PeakOfOscillation) {
    // Direct evaluation: sin(2 pi + 1.5 sin(pi / 2)) = sin(1.5).
    const auto t = oscillating(1.5);
    EXPECT_NEAR(t.modulation(pi / (2.0 * omega)), std::sin(1.5), 1e-12);
    EXPECT_NEAR(t.modulation(pi / (2.0 * omega)), 0.99749, 1e-5);
}

TEST(Modulation, Periodic) {
    const auto t = oscillating(1.5);
    const double period = 2.0 * pi / omega;
    for (int i = 0; i < 500; ++i) {
        const double time = i * period / 137.0;
        EXPECT_NEAR(t.modulation(time), t.modulation(time + period), 1e-12);
    }
}

TEST(Modulation, BoundedAndConstantWithoutAmplitude) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ubar(0.0, 4.0 * pi), amp(0.0, 5.0), time(0.0, 1e-3);
    for (int i = 0; i < 200; ++i) {
        const auto t = TrajectorySpec::oscillatory_dimensionless(length, ubar(rng), amp(rng), omega);
        const double m = t.modulation(time(rng));
        EXPECT_LE(m, 1.0);
        EXPECT_GE(m, -1.0);
    }
    const double u_bar = 1.234;
    const auto flat = TrajectorySpec::oscillatory_dimensionless(length, u_bar, 0.0, omega);
    for (double time_s : {0.0, 1e-6, 2e-5}) EXPECT_NEAR(flat.modulation(time_s), std::sin(u_bar), 1e-15);
}

TEST(Acceleration, InertialAndStaticAreZero) {
    EXPECT_EQ(TrajectorySpec::inertial(length, 0.9).acceleration(1e-3), 0.0);
    EXPECT_EQ(TrajectorySpec::static_at(length, 0.5).acceleration(1e-3), 0.0);
}

TEST(Acceleration, OscillatoryZeroAtStartAndPeakMagnitude) {
    const auto t = TrajectorySpec::oscillatory(length, 0.5, 1e-3, omega);
    EXPECT_EQ(t.acceleration(0.0), 0.0);
    EXPECT_NEAR(std::abs(t.acceleration(pi / (2.0 * omega))), 1e-3 * omega * omega,
                1e-9 * omega * omega);
}

TEST(Acceleration, MatchesSecondDifferenceOfPosition) {
    // Central second difference converges as O(dt^2): halving dt quarters the error.
    const auto t = TrajectorySpec::oscillatory(length, 0.5, 1e-3, omega);
    const double time = 0.37 / omega;
    auto error = [&](double dt) {
        const double fd = (t.position(time + dt) - 2.0 * t.position(time) + t.position(time - dt)) / (dt * dt);
        return std::abs(fd - t.acceleration(time));
    };
    const double dt = 0.05 / omega;
    const double e1 = error(dt), e2 = error(dt / 2.0);
    EXPECT_LT(e1, 1e-3 * omega * omega * 1e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(Trajectory, RejectsInvalidSpecs) {
    EXPECT_THROW(TrajectorySpec::static_at(length, -0.1), InvalidArgument);
    EXPECT_THROW(TrajectorySpec::static_at(length, 1.5), InvalidArgument);
    EXPECT_THROW(TrajectorySpec::oscillatory(length, 0.5, -1e-3, omega), InvalidArgument);
    EXPECT_THROW(TrajectorySpec::oscillatory(length, 0.5, 1e-3, 0.0), InvalidArgument);
    EXPECT_THROW(TrajectorySpec::inertial(length, -0.1), InvalidArgument);
    EXPECT_THROW(TrajectorySpec::static_at(0.0, 0.0), InvalidArgument);
}
