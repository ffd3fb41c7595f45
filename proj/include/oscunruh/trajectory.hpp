// trajectory.hpp
// Detector worldlines in a standing-wave cavity and the coupling modulation
// sin(k x(t)) they induce.

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "oscunruh/errors.hpp"

namespace oscunruh {

inline constexpr double speed_of_light = 299'792'458.0;

enum class TrajectoryKind { Static, Inertial, Oscillatory };

// Worldline x(t) inside a cavity of length L with k = 2 * 2pi / L.
// Lengths are in metres, angular frequencies in rad/s, velocity in units of c.
class TrajectorySpec {
public:
    static TrajectorySpec static_at(double cavity_length, double x_bar) {
        return TrajectorySpec(TrajectoryKind::Static, cavity_length, x_bar, 0.0, 0.0, 0.0);
    }

    static TrajectorySpec inertial(double cavity_length, double velocity_over_c) {
        return TrajectorySpec(TrajectoryKind::Inertial, cavity_length, 0.0, 0.0, 0.0,
                              velocity_over_c);
    }

    static TrajectorySpec oscillatory(double cavity_length, double x_bar, double amplitude,
                                      double omega) {
        return TrajectorySpec(TrajectoryKind::Oscillatory, cavity_length, x_bar, amplitude, omega,
                              0.0);
    }

    // Oscillatory worldline given directly by u_bar = k x_bar and u = k A.
    static TrajectorySpec oscillatory_dimensionless(double cavity_length, double u_bar, double u,
                                                    double omega) {
        const double k = wave_number_for(cavity_length);
        return oscillatory(cavity_length, u_bar / k, u / k, omega);
    }

    static TrajectorySpec static_dimensionless(double cavity_length, double u_bar) {
        return static_at(cavity_length, u_bar / wave_number_for(cavity_length));
    }

    static double wave_number_for(double cavity_length) {
        if (!(cavity_length > 0.0)) throw InvalidArgument("cavity length must be positive");
        return 4.0 * std::numbers::pi / cavity_length;
    }

    // Cavity length whose mode frequency k c equals omega_p.
    static double cavity_length_for_mode(double omega_p) {
        if (!(omega_p > 0.0)) throw InvalidArgument("mode frequency must be positive");
        return 4.0 * std::numbers::pi * speed_of_light / omega_p;
    }

    TrajectoryKind kind() const { return kind_; }
    double cavity_length() const { return length_; }
    double wave_number() const { return k_; }
    double x_bar() const { return x_bar_; }
    double amplitude() const { return amplitude_; }
    double omega() const { return omega_; }
    double velocity_over_c() const { return velocity_; }

    double u_bar() const { return k_ * x_bar_; }
    double u() const { return k_ * amplitude_; }

    double position(double t) const {
        switch (kind_) {
        case TrajectoryKind::Static: return x_bar_;
        case TrajectoryKind::Inertial: return velocity_ * speed_of_light * t;
        case TrajectoryKind::Oscillatory: return x_bar_ + amplitude_ * std::sin(omega_ * t);
        }
        return 0.0;
    }

    double modulation(double t) const {
        if (kind_ == TrajectoryKind::Oscillatory)
            return std::sin(u_bar() + u() * std::sin(omega_ * t));
        return std::sin(k_ * position(t));
    }

    double acceleration(double t) const {
        if (kind_ != TrajectoryKind::Oscillatory) return 0.0;
        return -amplitude_ * omega_ * omega_ * std::sin(omega_ * t);
    }

    // Largest angular frequency present in the modulation's leading harmonic.
    double drive_frequency() const {
        switch (kind_) {
        case TrajectoryKind::Static: return 0.0;
        case TrajectoryKind::Inertial: return k_ * velocity_ * speed_of_light;
        case TrajectoryKind::Oscillatory: return omega_;
        }
        return 0.0;
    }

    friend bool operator==(const TrajectorySpec&, const TrajectorySpec&) = default;

private:
    TrajectorySpec(TrajectoryKind kind, double length, double x_bar, double amplitude, double omega,
                   double velocity)
        : kind_(kind), length_(length), k_(wave_number_for(length)), x_bar_(x_bar),
          amplitude_(amplitude), omega_(omega), velocity_(velocity) {
        if (kind != TrajectoryKind::Inertial && (x_bar < 0.0 || x_bar > length * (1.0 + 1e-12)))
            throw InvalidArgument("x_bar must lie in [0, L]");
        if (amplitude < 0.0) throw InvalidArgument("amplitude must be >= 0");
        if (kind == TrajectoryKind::Oscillatory && !(omega > 0.0))
            throw InvalidArgument("oscillation frequency must be positive");
        if (kind == TrajectoryKind::Inertial && !(velocity >= 0.0))
            throw InvalidArgument("inertial velocity must be >= 0");
    }

    TrajectoryKind kind_;
    double length_;
    double k_;
    double x_bar_;
    double amplitude_;
    double omega_;
    double velocity_;
};

inline std::string to_string(TrajectoryKind kind) {
    switch (kind) {
    case TrajectoryKind::Static: return "static";
    case TrajectoryKind::Inertial: return "inertial";
    case TrajectoryKind::Oscillatory: return "oscillatory";
    }
    return "?";
}

}  // namespace oscunruh
