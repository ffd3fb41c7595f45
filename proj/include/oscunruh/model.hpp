// model.hpp
// Frequencies of the detector-cavity model. All values are angular
// frequencies in rad/s (hbar = 1).

#pragma once

#include <cmath>
#include <numbers>

#include "oscunruh/errors.hpp"

namespace oscunruh {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct ModelParams {
    double omega_p = two_pi * 150e3;
    double omega_q = two_pi * 150e3;
    double g0 = two_pi * 1.92e3;

    void validate() const {
        if (!(omega_p > 0.0 && omega_q > 0.0 && g0 > 0.0))
            throw InvalidArgument("model frequencies omega_p, omega_q, g0 must be positive");
    }

    // The rotating-wave reduction assumes g0 << omega_p, omega_q.
    bool weak_coupling() const { return g0 <= omega_p / 10.0 && g0 <= omega_q / 10.0; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

}  // namespace oscunruh
