// floquet.hpp
// Jacobi-Anger decomposition of the trajectory modulation, rotating-wave
// effective couplings at the two analysed resonances, and the closed-form
// predictions that follow from them.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "oscunruh/errors.hpp"
#include "oscunruh/hilbert.hpp"
#include "oscunruh/model.hpp"

namespace oscunruh {

namespace detail {

// Ascending series sum_k (-1)^k (u/2)^(2k+n) / (k! (k+n)!).
inline double bessel_series(int n, double u) {
    const double half = 0.5 * u;
    double term = 1.0;
    for (int j = 1; j <= n; ++j) term *= half / j;
    double sum = term;
    const double q = -half * half;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) break;
    }
    return sum;
}

// Miller backward recurrence normalised with J_0 + 2 sum_k J_2k = 1.
inline double bessel_backward(int n, double u) {
    const int top = std::max(n, static_cast<int>(u));
    int start = top + 30 + static_cast<int>(std::sqrt(40.0 * top));
    if (start % 2 != 0) ++start;
    double next = 0.0;   // J_{k+1}
    double current = 1e-300;  // J_k
    double result = 0.0;
    double norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double prev = 2.0 * k / u * current - next;  // J_{k-1}
        next = current;
        current = prev;
        if (k - 1 == n) result = current;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * current;
        if (std::abs(current) > 1e250) {
            next *= 1e-250;
            current *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += current;  // J_0
    return result / norm;
}

}  // namespace detail

inline constexpr double bessel_max_argument = 50.0;
inline constexpr double bessel_series_limit = 10.0;

// Bessel function of the first kind J_n(u), n >= 0, |u| <= 50.
inline double bessel_j(int n, double u) {
    if (n < 0) throw InvalidArgument("bessel_j: order must be >= 0");
    if (!(std::abs(u) <= bessel_max_argument))
        throw InvalidArgument("bessel_j: argument outside [-50, 50]");
    if (u == 0.0) return n == 0 ? 1.0 : 0.0;
    const double sign = (u < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    const double x = std::abs(u);
    const double value =
        x <= bessel_series_limit ? detail::bessel_series(n, x) : detail::bessel_backward(n, x);
    return sign * value;
}

// dJ_n/du = (J_{n-1} - J_{n+1}) / 2, with J_{-1} = -J_1.
inline double bessel_j_derivative(int n, double u) {
    const double lower = n == 0 ? -bessel_j(1, u) : bessel_j(n - 1, u);
    return 0.5 * (lower - bessel_j(n + 1, u));
}

// One harmonic of sin(u_bar + u sin(w t)) = sum_h a_h cos(h w t) + b_h sin(h w t).
struct Harmonic {
    int order = 0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

// Harmonics 0 .. 2 n_max of the Jacobi-Anger series.
inline std::vector<Harmonic> jacobi_anger_coeffs(double u_bar, double u, int n_max) {
    if (n_max < 1) throw InvalidArgument("jacobi_anger_coeffs: n_max must be >= 1");
    std::vector<Harmonic> table(2 * n_max + 1);
    const double s = std::sin(u_bar);
    const double c = std::cos(u_bar);
    for (int h = 0; h <= 2 * n_max; ++h) {
        table[h].order = h;
        if (h == 0)
            table[h].cos_coeff = s * bessel_j(0, u);
        else if (h % 2 == 0)
            table[h].cos_coeff = 2.0 * s * bessel_j(h, u);
        else
            table[h].sin_coeff = 2.0 * c * bessel_j(h, u);
    }
    return table;
}

inline double evaluate_harmonics(const std::vector<Harmonic>& table, double phase) {
    double sum = 0.0;
    for (const auto& h : table)
        sum += h.cos_coeff * std::cos(h.order * phase) + h.sin_coeff * std::sin(h.order * phase);
    return sum;
}

enum class CouplingKind { JC, AntiJC };

// Resonant term g0 * (amplitude * X + conj(amplitude) * X^dagger) with
// X = sigma_+ a (JC) or sigma_+ a^dagger (anti-JC).
struct EffectiveTerm {
    CouplingKind kind = CouplingKind::JC;
    std::complex<double> amplitude;
    int source_harmonic = 0;
};

struct ResonanceContext {
    double omega = 0.0;
    double omega_p = 0.0;
    double omega_q = 0.0;
    double u_bar = 0.0;
    double u = 0.0;
};

struct EffectiveHamiltonian {
    std::vector<EffectiveTerm> terms;
    bool off_resonance = false;
};

namespace detail {
inline bool close(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}
}  // namespace detail

// Rotating-wave reduction for the degenerate case omega_p == omega_q at the
// sum resonance (omega = omega_p + omega_q) and the single resonance
// (omega = omega_p). Any other drive is flagged off-resonant.
inline EffectiveHamiltonian effective_hamiltonian(const ResonanceContext& ctx) {
    if (!(ctx.omega > 0.0 && ctx.omega_p > 0.0 && ctx.omega_q > 0.0))
        throw InvalidArgument("effective_hamiltonian: frequencies must be positive");
    if (!detail::close(ctx.omega_p, ctx.omega_q))
        throw UnsupportedConfiguration(
            "effective_hamiltonian: only the degenerate case omega_p == omega_q is reduced");
    const double s = std::sin(ctx.u_bar);
    const double c = std::cos(ctx.u_bar);
    EffectiveHamiltonian out;
    if (detail::close(ctx.omega, ctx.omega_p + ctx.omega_q)) {
        out.terms.push_back({CouplingKind::JC, {s * bessel_j(0, ctx.u), 0.0}, 0});
        out.terms.push_back({CouplingKind::AntiJC, {0.0, c * bessel_j(1, ctx.u)}, 1});
    } else if (detail::close(ctx.omega, ctx.omega_p)) {
        out.terms.push_back({CouplingKind::JC, {s * bessel_j(0, ctx.u), 0.0}, 0});
        out.terms.push_back({CouplingKind::AntiJC, {s * bessel_j(2, ctx.u), 0.0}, 2});
    } else {
        out.off_resonance = true;
    }
    return out;
}

// Time-independent interaction-picture Hamiltonian built from the terms, on
// the single-trajectory layout.
inline OperatorMatrix effective_hamiltonian_matrix(const std::vector<EffectiveTerm>& terms, double g0,
                                                   const SystemLayout& layout) {
    if (layout.control_levels != 1)
        throw InvalidArgument("effective_hamiltonian_matrix expects a single-trajectory layout");
    const auto sp = embed(layout, Subsystem::Detector, pauli(Pauli::Plus));
    const auto a = embed(layout, Subsystem::Mode, annihilation(layout.fock_dim));
    const auto ad = a.adjoint();
    Matrix h = Matrix::Zero(layout.dim(), layout.dim());
    for (const auto& term : terms) {
        const Matrix x = (term.kind == CouplingKind::JC ? sp * a : sp * ad).matrix();
        h += g0 * (term.amplitude * x + std::conj(term.amplitude) * x.adjoint());
    }
    return OperatorMatrix(std::move(h));
}

// Full |g,0> -> |e,1> -> |g,0> return time pi / (g0 |cos(u_bar) J_1(u)|) at
// the sum resonance.
inline double rabi_period_prediction(double g0, double u_bar, double u) {
    if (!(g0 > 0.0)) throw InvalidArgument("rabi_period_prediction: g0 must be positive");
    const double coupling = std::abs(std::cos(u_bar) * bessel_j(1, u));
    if (coupling < 1e-12)
        throw UndefinedPeriod("anti-JC amplitude vanishes; no vacuum Rabi oscillation");
    return std::numbers::pi / (g0 * coupling);
}

inline double rabi_period_prediction(const ModelParams& params, double u_bar, double u) {
    params.validate();
    return rabi_period_prediction(params.g0, u_bar, u);
}

// Two-level anti-JC excitation <N>(t) = sin^2(g0 |cos(u_bar) J_1(u)| t) from |g,0>.
inline double anti_jc_excitation(double g0, double u_bar, double u, double t) {
    const double s = std::sin(g0 * std::abs(std::cos(u_bar) * bessel_j(1, u)) * t);
    return s * s;
}

// Smallest u > 0 with J_0(u) = J_2(u), i.e. the first maximum of J_1.
inline double displacement_condition() {
    auto f = [](double u) { return bessel_j(0, u) - bessel_j(2, u); };
    double lo = 1.5, hi = 2.2;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// omega_q + gamma (c k - k v) for a co-propagating inertial detector.
// Strictly positive for every subluminal v: no inertial resonance exists.
inline double relativistic_resonance_residual(double v, double omega_q, double k, double c) {
    if (!(c > 0.0)) throw InvalidArgument("speed of light must be positive");
    if (!(v >= 0.0) || !(v < c))
        throw InvalidArgument("velocity must satisfy 0 <= v < c");
    const double beta = v / c;
    const double gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
    return omega_q + gamma * (c * k - k * v);
}

}  // namespace oscunruh
