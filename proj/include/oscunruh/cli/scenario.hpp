// scenario.hpp
// Runs a parsed scenario and writes its output files.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oscunruh/cli/config.hpp"
#include "oscunruh/cli/feasibility.hpp"
#include "oscunruh/cli/scan_io.hpp"
#include "oscunruh/dynamics.hpp"
#include "oscunruh/tomography.hpp"

namespace oscunruh::cli {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2, exit_warning = 3 };

struct RunOutcome {
    int exit_code = exit_ok;
    std::vector<std::string> files;
    std::string summary;
};

inline EvolutionResult simulate(const DynamicsConfig& d) {
    const auto layout = d.layout();
    const double nbar = d.lindblad ? d.lindblad->initial_nbar : 0.0;
    const auto state = ground_state(layout, d.initial_control, nbar);
    const TimeDependentHamiltonian h =
        d.trajectories.size() == 2
            ? hamiltonian_superposed(d.model, d.trajectories[0].build(d.model), d.trajectories[1].build(d.model), layout)
            : hamiltonian_single(d.model, d.trajectories[0].build(d.model), layout);
    const EvolutionOptions opt{d.t_final, d.dt, d.sample_interval, false};
    if (d.lindblad || !state.is_pure())
        return evolve_lindblad(state.is_pure() ? state.to_density() : state, h, d.lindblad.value_or(LindbladSpec{}), opt);
    return evolve_unitary(state, h, opt);
}

inline std::string format_trace_csv(const EvolutionResult& r, const std::vector<std::string>& outputs) {
    std::string out = "time_us";
    for (const auto& name : outputs) out += "," + name;
    out += "\n";
    char buf[32];
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12e", r.times[i] / 1e-6);
        out += buf;
        for (const auto& name : outputs) {
            std::snprintf(buf, sizeof buf, ",%.12e", r.trace(name)[i]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline std::string format_fit_csv(const FitResult& f) {
    std::string out = "n,p_g,sigma_g,p_e,sigma_e\n";
    char buf[160];
    const auto& d = f.distribution;
    for (int n = 0; n <= d.n_max(); ++n) {
        std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e,%.12e,%.12e\n", n, d.p_g[n], f.sigma_g[n], d.p_e[n], f.sigma_e[n]);
        out += buf;
    }
    return out;
}

inline std::string describe_fit(const FitResult& f) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<N> = %.4f +- %.4f (truncation n <= %d, residual %.3e, condition %.3e)", f.mean_phonon,
                  f.mean_phonon_sigma, f.selected_n_max, f.residual_norm, f.condition_number);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
}

// Red and blue noise streams are derived from the scenario seed.
inline std::pair<SidebandScan, SidebandScan> synthesize_pair(const TomographyConfig& t, std::uint64_t seed) {
    const auto times = t.times();
    std::optional<ShotNoise> red_noise, blue_noise;
    if (t.shots > 0) {
        red_noise = ShotNoise{t.shots, 2 * seed + 1};
        blue_noise = ShotNoise{t.shots, 2 * seed + 2};
    }
    return {synthesize_scan(t.distribution, Sideband::Red, t.eta, t.omega0, times, red_noise),
            synthesize_scan(t.distribution, Sideband::Blue, t.eta, t.omega0, times, blue_noise)};
}

inline std::string describe_feasibility(const FeasibilityEstimate& e) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "u = %.6e\ng_eff / 2pi = %.6e Hz\nrate = %.6e Hz\nexcitations per lifetime = %.6e%s", e.u,
                  e.g_eff / two_pi, e.rate_hz, e.excitations_per_lifetime,
                  e.large_amplitude ? "\nwarning: u > 0.1, small-oscillation estimate is unreliable" : "");
    return buf;
}

inline RunOutcome run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir) {
    validate(c);
    std::filesystem::create_directories(out_dir);
    RunOutcome outcome;
    switch (c.type) {
    case ScenarioType::Dynamics: {
        const auto result = simulate(c.dynamics);
        const auto path = out_dir / (c.name + ".csv");
        write_text(path, format_trace_csv(result, c.dynamics.outputs));
        outcome.files.push_back(path.string());
        char buf[200];
        std::snprintf(buf, sizeof buf, "%zu samples, dt = %.4e s, norm drift %.2e, max leakage %.2e", result.times.size(),
                      result.dt, result.norm_drift, result.leakage_max);
        outcome.summary = buf;
        if (result.truncation_warning) {
            outcome.summary += "\nwarning: truncation leakage above threshold; increase fock_dim";
            outcome.exit_code = exit_warning;
        }
        break;
    }
    case ScenarioType::Tomography: {
        const auto& t = c.tomography;
        const auto [red, blue] = synthesize_pair(t, c.seed);
        const auto red_path = out_dir / (c.name + "_red.scan");
        const auto blue_path = out_dir / (c.name + "_blue.scan");
        write_text(red_path, format_scan(red));
        write_text(blue_path, format_scan(blue));
        const auto fit = fit_distribution(red, blue, t.fit_n_max, t.truncation);
        const auto fit_path = out_dir / (c.name + "_fit.csv");
        write_text(fit_path, format_fit_csv(fit));
        outcome.files = {red_path.string(), blue_path.string(), fit_path.string()};
        char buf[64];
        std::snprintf(buf, sizeof buf, "true <N> = %.4f\n", mean_phonon(t.distribution));
        outcome.summary = buf + describe_fit(fit);
        break;
    }
    case ScenarioType::Feasibility: {
        const auto e = feasibility_estimate(c.feasibility);
        const auto path = out_dir / (c.name + ".csv");
        char buf[200];
        std::snprintf(buf, sizeof buf, "u,g_eff_over_2pi_hz,rate_hz,excitations_per_lifetime\n%.12e,%.12e,%.12e,%.12e\n",
                      e.u, e.g_eff / two_pi, e.rate_hz, e.excitations_per_lifetime);
        write_text(path, buf);
        outcome.files.push_back(path.string());
        outcome.summary = describe_feasibility(e);
        break;
    }
    }
    return outcome;
}

}  // namespace oscunruh::cli
