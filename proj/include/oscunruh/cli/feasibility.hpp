// feasibility.hpp
// Small-oscillation excitation-rate estimate for a micromotion-driven detector
// coupled to a resonant cavity mode.

#pragma once

#include <cmath>
#include <optional>

#include "oscunruh/errors.hpp"
#include "oscunruh/floquet.hpp"
#include "oscunruh/trajectory.hpp"

namespace oscunruh::cli {

struct FeasibilityInputs {
    double omega = 0.0;                  // drive (motion) angular frequency, rad/s
    double omega_q = 0.0;                // detector splitting, rad/s
    std::optional<double> omega_p;       // cavity mode, rad/s; defaults to omega - omega_q
    double amplitude = 0.0;              // m
    double c = speed_of_light;           // m/s
    double g0 = 0.0;                     // rad/s
    double lifetime = 1.0;               // s

    double mode_frequency() const { return omega_p ? *omega_p : omega - omega_q; }

    void validate() const {
        if (!(omega > 0.0) || !(omega_q > 0.0)) throw InvalidArgument("omega and omega_q must be positive");
        if (!(mode_frequency() > 0.0)) throw InvalidArgument("mode frequency must be positive (omega > omega_q)");
        if (!(amplitude >= 0.0)) throw InvalidArgument("amplitude must be >= 0");
        if (!(c > 0.0)) throw InvalidArgument("speed of light must be positive");
        if (!(g0 >= 0.0)) throw InvalidArgument("g0 must be >= 0");
        if (!(lifetime > 0.0)) throw InvalidArgument("lifetime must be positive");
    }

    friend bool operator==(const FeasibilityInputs&, const FeasibilityInputs&) = default;
};

struct FeasibilityEstimate {
    double u = 0.0;
    double g_eff = 0.0;     // rad/s
    double rate_hz = 0.0;
    double excitations_per_lifetime = 0.0;
    bool large_amplitude = false;  // u > 0.1: small-oscillation picture is questionable
};

// u = k A with k = omega_p / c, g_eff = g0 J1(u), rate = 2 g_eff / 2pi.
inline FeasibilityEstimate feasibility_estimate(const FeasibilityInputs& in) {
    in.validate();
    FeasibilityEstimate out;
    out.u = in.mode_frequency() / in.c * in.amplitude;
    out.g_eff = in.g0 * bessel_j(1, out.u);
    out.rate_hz = 2.0 * out.g_eff / two_pi;
    out.excitations_per_lifetime = out.rate_hz * in.lifetime;
    out.large_amplitude = out.u > 0.1;
    return out;
}

}  // namespace oscunruh::cli
