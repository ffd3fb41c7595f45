// config.hpp
// Scenario configs: a YAML tree with unit-suffixed keys, parsed into SI.
//
// Every physical quantity is written as <name>_<unit>:
//   angular frequencies  <name>_over_2pi_{hz,khz,mhz,ghz}   (value times 2pi)
//   times                <name>_{s,ms,us,ns}
//   lengths              <name>_{m,mm,um,nm}
// Exactly one unit variant of each quantity may appear. Unknown keys are
// errors. See docs/config.md for the full grammar.

#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oscunruh/cli/feasibility.hpp"
#include "oscunruh/dynamics.hpp"
#include "oscunruh/tomography.hpp"

namespace oscunruh::cli {

struct ConfigError : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

enum class ScenarioType { Dynamics, Tomography, Feasibility };

// Trajectory as written in the config; turned into a TrajectorySpec once the
// cavity length is known.
struct TrajectoryConfig {
    TrajectoryKind kind = TrajectoryKind::Oscillatory;
    double u_bar_over_pi = 2.0;
    double u = 0.0;
    double omega = 0.0;  // rad/s, oscillatory only
    double velocity_over_c = 0.0;
    std::optional<double> cavity_length;  // m; default puts the mode at omega_p

    TrajectorySpec build(const ModelParams& model) const {
        const double length = cavity_length ? *cavity_length : TrajectorySpec::cavity_length_for_mode(model.omega_p);
        const double u_bar = u_bar_over_pi * std::numbers::pi;
        switch (kind) {
        case TrajectoryKind::Static: return TrajectorySpec::static_dimensionless(length, u_bar);
        case TrajectoryKind::Inertial: return TrajectorySpec::inertial(length, velocity_over_c);
        case TrajectoryKind::Oscillatory:
            return TrajectorySpec::oscillatory_dimensionless(length, u_bar, u, omega);
        }
        throw InvalidArgument("unknown trajectory kind");
    }

    friend bool operator==(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

struct DynamicsConfig {
    ModelParams model;
    int fock_dim = 10;
    std::vector<TrajectoryConfig> trajectories;
    ControlPreparation initial_control = ControlPreparation::Zero;
    std::optional<LindbladSpec> lindblad;
    double t_final = 0.0;
    double sample_interval = 2e-6;
    double dt = 0.0;  // 0: default step
    std::vector<std::string> outputs;

    SystemLayout layout() const {
        return trajectories.size() == 2 ? SystemLayout::superposed(fock_dim) : SystemLayout::single(fock_dim);
    }

    friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

struct TomographyConfig {
    PhononDistribution distribution = PhononDistribution::vacuum(1);
    double eta = 0.065;
    double omega0 = 0.0;  // rad/s
    double t_max = 0.0;   // s
    double t_step = 0.0;  // s
    int shots = 100;      // 0: noiseless
    int fit_n_max = 5;
    Truncation truncation = Truncation::Aic;

    std::vector<double> times() const {
        std::vector<double> t;
        const auto count = static_cast<long>(std::floor(t_max / t_step + 1e-9));
        for (long i = 0; i <= count; ++i) t.push_back(static_cast<double>(i) * t_step);
        return t;
    }

    friend bool operator==(const TomographyConfig& a, const TomographyConfig& b) {
        return a.distribution.p_g == b.distribution.p_g && a.distribution.p_e == b.distribution.p_e &&
               a.distribution.blue_coherence == b.distribution.blue_coherence &&
               a.distribution.red_coherence == b.distribution.red_coherence && a.eta == b.eta &&
               a.omega0 == b.omega0 && a.t_max == b.t_max && a.t_step == b.t_step && a.shots == b.shots &&
               a.fit_n_max == b.fit_n_max && a.truncation == b.truncation;
    }
};

struct ScenarioConfig {
    std::string name;
    ScenarioType type = ScenarioType::Dynamics;
    std::uint64_t seed = 1;
    DynamicsConfig dynamics;
    TomographyConfig tomography;
    FeasibilityInputs feasibility;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline std::string to_string(ScenarioType t) {
    switch (t) {
    case ScenarioType::Dynamics: return "dynamics";
    case ScenarioType::Tomography: return "tomography";
    case ScenarioType::Feasibility: return "feasibility";
    }
    return "?";
}

inline std::string to_string(ControlPreparation p) {
    switch (p) {
    case ControlPreparation::Zero: return "zero";
    case ControlPreparation::One: return "one";
    case ControlPreparation::Plus: return "plus";
    case ControlPreparation::Minus: return "minus";
    case ControlPreparation::Mixture: return "mixture";
    }
    return "?";
}

namespace detail {

enum class Dimension { Frequency, Time, Length };

inline const std::vector<std::pair<std::string, double>>& units(Dimension d) {
    static const std::vector<std::pair<std::string, double>> freq{
        {"over_2pi_hz", two_pi}, {"over_2pi_khz", two_pi * 1e3}, {"over_2pi_mhz", two_pi * 1e6}, {"over_2pi_ghz", two_pi * 1e9}};
    static const std::vector<std::pair<std::string, double>> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    static const std::vector<std::pair<std::string, double>> length{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    switch (d) {
    case Dimension::Frequency: return freq;
    case Dimension::Time: return time;
    case Dimension::Length: return length;
    }
    return time;
}

inline std::string where(const YAML::Node& node, const std::string& path) {
    const auto mark = node.Mark();
    std::string s = "field '" + path + "'";
    if (mark.line >= 0) s = "line " + std::to_string(mark.line + 1) + ", " + s;
    return s;
}

// Reads a YAML mapping, remembering which keys were used so leftovers can be
// reported as unknown.
class MapReader {
public:
    MapReader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) throw ConfigError(where(node_, path_) + ": expected a mapping");
    }

    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node node(const std::string& key) {
        used_.insert(key);
        const YAML::Node n = node_[key];
        if (!n) throw ConfigError(where(node_, path_) + ": missing required key '" + key + "'");
        return n;
    }

    template <class T>
    T get(const std::string& key) {
        const YAML::Node n = node(key);
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where(n, child_path(key)) + ": cannot read value '" + n.Scalar() + "'");
        }
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return get<T>(key);
    }

    std::optional<double> quantity(const std::string& base, Dimension dim) {
        std::optional<double> value;
        std::string found;
        for (const auto& [suffix, scale] : units(dim)) {
            const std::string key = base + "_" + suffix;
            if (!has(key)) continue;
            if (value) throw ConfigError(where(node_[key], child_path(key)) + ": '" + base + "' also given as '" + found + "'");
            value = get<double>(key) * scale;
            found = key;
        }
        return value;
    }

    double required(const std::string& base, Dimension dim) {
        const auto v = quantity(base, dim);
        if (!v) throw ConfigError(where(node_, path_) + ": missing required quantity '" + base + "_<unit>'");
        return *v;
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (!used_.count(key)) throw ConfigError(where(it->first, child_path(key)) + ": unknown key '" + key + "'");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
};

inline TrajectoryConfig parse_trajectory(const YAML::Node& node, const std::string& path) {
    MapReader r(node, path);
    TrajectoryConfig t;
    const auto kind = r.get<std::string>("kind");
    if (kind == "static") {
        t.kind = TrajectoryKind::Static;
        t.u_bar_over_pi = r.get<double>("u_bar_over_pi");
    } else if (kind == "inertial") {
        t.kind = TrajectoryKind::Inertial;
        t.velocity_over_c = r.get<double>("velocity_over_c");
    } else if (kind == "oscillatory") {
        t.kind = TrajectoryKind::Oscillatory;
        t.u_bar_over_pi = r.get<double>("u_bar_over_pi");
        t.u = r.get<double>("u");
        t.omega = r.required("omega", Dimension::Frequency);
    } else {
        throw ConfigError(where(node["kind"], r.child_path("kind")) +
                          ": kind must be static, inertial or oscillatory");
    }
    t.cavity_length = r.quantity("cavity_length", Dimension::Length);
    r.finish();
    return t;
}

inline ControlPreparation parse_control(const std::string& s, const YAML::Node& node, const std::string& path) {
    for (auto p : {ControlPreparation::Zero, ControlPreparation::One, ControlPreparation::Plus,
                   ControlPreparation::Minus, ControlPreparation::Mixture})
        if (to_string(p) == s) return p;
    throw ConfigError(where(node, path) + ": initial_control must be zero, one, plus, minus or mixture");
}

inline void parse_dynamics(MapReader& r, DynamicsConfig& d) {
    {
        MapReader m(r.node("model"), "model");
        d.model.omega_p = m.required("omega_p", Dimension::Frequency);
        d.model.omega_q = m.required("omega_q", Dimension::Frequency);
        d.model.g0 = m.required("g0", Dimension::Frequency);
        m.finish();
    }
    d.fock_dim = r.get<int>("fock_dim", 10);
    const YAML::Node trajs = r.node("trajectories");
    if (!trajs.IsSequence() || trajs.size() < 1 || trajs.size() > 2)
        throw ConfigError(where(trajs, "trajectories") + ": expected a list of one or two trajectories");
    for (std::size_t i = 0; i < trajs.size(); ++i)
        d.trajectories.push_back(parse_trajectory(trajs[i], "trajectories[" + std::to_string(i) + "]"));
    d.initial_control = d.trajectories.size() == 2 ? ControlPreparation::Plus : ControlPreparation::Zero;
    if (r.has("initial_control"))
        d.initial_control = parse_control(r.get<std::string>("initial_control"), r.node("initial_control"),
                                          "initial_control");
    if (r.has("lindblad")) {
        MapReader l(r.node("lindblad"), "lindblad");
        LindbladSpec spec;
        if (auto t2 = l.quantity("t2", Dimension::Time)) spec.t2 = *t2;
        spec.heating_rate = l.get<double>("heating_rate_quanta_per_s", 0.0);
        spec.initial_nbar = l.get<double>("initial_nbar", 0.0);
        if (l.has("dephasing_weights")) {
            const auto w = l.get<std::vector<double>>("dephasing_weights");
            if (w.size() != 2)
                throw ConfigError(where(l.node("dephasing_weights"), "lindblad.dephasing_weights") + ": expected two weights");
            spec.dephasing_weights = {w[0], w[1]};
        }
        l.finish();
        d.lindblad = spec;
    }
    {
        MapReader t(r.node("time"), "time");
        d.t_final = t.required("t_final", Dimension::Time);
        d.sample_interval = t.quantity("sample_interval", Dimension::Time).value_or(2e-6);
        d.dt = t.quantity("dt", Dimension::Time).value_or(0.0);
        t.finish();
    }
    d.outputs = r.get<std::vector<std::string>>("outputs");
}

inline std::vector<double> list_or_zeros(MapReader& r, const std::string& key, std::size_t size) {
    if (!r.has(key)) return std::vector<double>(size, 0.0);
    auto v = r.get<std::vector<double>>(key);
    if (v.size() != size)
        throw ConfigError(where(r.node(key), r.child_path(key)) + ": expected " + std::to_string(size) + " entries");
    return v;
}

inline void parse_tomography(MapReader& r, TomographyConfig& t) {
    {
        MapReader d(r.node("distribution"), "distribution");
        const auto p_g = d.get<std::vector<double>>("p_g");
        const auto p_e = d.get<std::vector<double>>("p_e");
        if (p_g.size() < 2 || p_e.size() != p_g.size())
            throw ConfigError(where(d.node("p_e"), "distribution.p_e") + ": p_g and p_e need equal length >= 2");
        t.distribution.p_g = p_g;
        t.distribution.p_e = p_e;
        t.distribution.blue_coherence = list_or_zeros(d, "blue_coherence", p_g.size() - 1);
        t.distribution.red_coherence = list_or_zeros(d, "red_coherence", p_g.size() - 1);
        d.finish();
    }
    {
        MapReader s(r.node("scan"), "scan");
        t.eta = s.get<double>("eta");
        t.omega0 = s.required("omega0", Dimension::Frequency);
        t.t_max = s.required("t_max", Dimension::Time);
        t.t_step = s.required("t_step", Dimension::Time);
        t.shots = s.get<int>("shots", 100);
        s.finish();
    }
    if (r.has("fit")) {
        MapReader f(r.node("fit"), "fit");
        t.fit_n_max = f.get<int>("n_max", 5);
        const auto rule = f.get<std::string>("truncation", "aic");
        if (rule == "aic")
            t.truncation = Truncation::Aic;
        else if (rule == "fixed")
            t.truncation = Truncation::Fixed;
        else
            throw ConfigError(where(f.node("truncation"), "fit.truncation") + ": expected aic or fixed");
        f.finish();
    }
}

inline void parse_feasibility(MapReader& r, FeasibilityInputs& f) {
    f.omega = r.required("omega", Dimension::Frequency);
    f.omega_q = r.required("omega_q", Dimension::Frequency);
    f.omega_p = r.quantity("omega_p", Dimension::Frequency);
    f.amplitude = r.required("amplitude", Dimension::Length);
    f.g0 = r.required("g0", Dimension::Frequency);
    f.lifetime = r.required("lifetime", Dimension::Time);
}

}  // namespace detail

// Checks every module-level invariant that can be checked without running.
inline void validate(const ScenarioConfig& c) {
    if (c.name.empty()) throw ConfigError("field 'name': must not be empty");
    switch (c.type) {
    case ScenarioType::Dynamics: {
        const auto& d = c.dynamics;
        d.model.validate();
        const auto layout = d.layout();
        layout.validate();
        for (const auto& t : d.trajectories) (void)t.build(d.model);
        if (d.lindblad) d.lindblad->validate();
        if (layout.control_levels == 1 && d.initial_control != ControlPreparation::Zero)
            throw ConfigError("field 'initial_control': a single trajectory has no control qubit");
        if (!(d.t_final > 0.0)) throw ConfigError("field 'time.t_final': must be positive");
        if (!(d.sample_interval > 0.0)) throw ConfigError("field 'time.sample_interval': must be positive");
        if (d.dt < 0.0) throw ConfigError("field 'time.dt': must be >= 0");
        if (d.outputs.empty()) throw ConfigError("field 'outputs': request at least one observable");
        const ObservableSet obs(layout);
        for (const auto& name : d.outputs)
            if (!obs.has(name)) throw ConfigError("field 'outputs': unknown observable '" + name + "' for this layout");
        break;
    }
    case ScenarioType::Tomography: {
        const auto& t = c.tomography;
        t.distribution.validate();
        (void)sideband_rabi_frequency(0, t.eta, t.omega0);
        if (!(t.omega0 > 0.0)) throw ConfigError("field 'scan.omega0': must be positive");
        if (!(t.t_step > 0.0) || !(t.t_max > 0.0)) throw ConfigError("field 'scan': t_max and t_step must be positive");
        if (t.shots < 0) throw ConfigError("field 'scan.shots': must be >= 0");
        if (t.fit_n_max < 1) throw ConfigError("field 'fit.n_max': must be >= 1");
        break;
    }
    case ScenarioType::Feasibility: c.feasibility.validate(); break;
    }
}

inline ScenarioConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    detail::MapReader r(root, "");
    ScenarioConfig c;
    const auto type = r.get<std::string>("type");
    if (type == "dynamics")
        c.type = ScenarioType::Dynamics;
    else if (type == "tomography")
        c.type = ScenarioType::Tomography;
    else if (type == "feasibility")
        c.type = ScenarioType::Feasibility;
    else
        throw ConfigError(detail::where(root["type"], "type") + ": expected dynamics, tomography or feasibility");
    c.name = r.get<std::string>("name");
    c.seed = r.get<std::uint64_t>("seed", 1);
    switch (c.type) {
    case ScenarioType::Dynamics: detail::parse_dynamics(r, c.dynamics); break;
    case ScenarioType::Tomography: detail::parse_tomography(r, c.tomography); break;
    case ScenarioType::Feasibility: detail::parse_feasibility(r, c.feasibility); break;
    }
    r.finish();
    try {
        validate(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return c;
}

// Canonical text form: kHz for dynamics frequencies, us for times.
inline std::string serialize(const ScenarioConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "type" << YAML::Value << to_string(c.type);
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    auto khz = [](double w) { return w / (two_pi * 1e3); };
    auto us = [](double t) { return t / 1e-6; };
    switch (c.type) {
    case ScenarioType::Dynamics: {
        const auto& d = c.dynamics;
        out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "omega_p_over_2pi_khz" << YAML::Value << khz(d.model.omega_p);
        out << YAML::Key << "omega_q_over_2pi_khz" << YAML::Value << khz(d.model.omega_q);
        out << YAML::Key << "g0_over_2pi_khz" << YAML::Value << khz(d.model.g0);
        out << YAML::EndMap;
        out << YAML::Key << "fock_dim" << YAML::Value << d.fock_dim;
        out << YAML::Key << "trajectories" << YAML::Value << YAML::BeginSeq;
        for (const auto& t : d.trajectories) {
            out << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << to_string(t.kind);
            if (t.kind != TrajectoryKind::Inertial)
                out << YAML::Key << "u_bar_over_pi" << YAML::Value << t.u_bar_over_pi;
            if (t.kind == TrajectoryKind::Oscillatory) {
                out << YAML::Key << "u" << YAML::Value << t.u;
                out << YAML::Key << "omega_over_2pi_khz" << YAML::Value << khz(t.omega);
            }
            if (t.kind == TrajectoryKind::Inertial)
                out << YAML::Key << "velocity_over_c" << YAML::Value << t.velocity_over_c;
            if (t.cavity_length) out << YAML::Key << "cavity_length_m" << YAML::Value << *t.cavity_length;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        if (d.trajectories.size() == 2)
            out << YAML::Key << "initial_control" << YAML::Value << to_string(d.initial_control);
        if (d.lindblad) {
            const auto& l = *d.lindblad;
            out << YAML::Key << "lindblad" << YAML::Value << YAML::BeginMap;
            if (std::isfinite(l.t2)) out << YAML::Key << "t2_us" << YAML::Value << us(l.t2);
            out << YAML::Key << "heating_rate_quanta_per_s" << YAML::Value << l.heating_rate;
            out << YAML::Key << "initial_nbar" << YAML::Value << l.initial_nbar;
            out << YAML::Key << "dephasing_weights" << YAML::Value << YAML::Flow << YAML::BeginSeq
                << l.dephasing_weights[0] << l.dephasing_weights[1] << YAML::EndSeq;
            out << YAML::EndMap;
        }
        out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "t_final_us" << YAML::Value << us(d.t_final);
        out << YAML::Key << "sample_interval_us" << YAML::Value << us(d.sample_interval);
        if (d.dt > 0.0) out << YAML::Key << "dt_us" << YAML::Value << us(d.dt);
        out << YAML::EndMap;
        out << YAML::Key << "outputs" << YAML::Value << YAML::Flow << d.outputs;
        break;
    }
    case ScenarioType::Tomography: {
        const auto& t = c.tomography;
        out << YAML::Key << "distribution" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "p_g" << YAML::Value << YAML::Flow << t.distribution.p_g;
        out << YAML::Key << "p_e" << YAML::Value << YAML::Flow << t.distribution.p_e;
        out << YAML::Key << "blue_coherence" << YAML::Value << YAML::Flow << t.distribution.blue_coherence;
        out << YAML::Key << "red_coherence" << YAML::Value << YAML::Flow << t.distribution.red_coherence;
        out << YAML::EndMap;
        out << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "eta" << YAML::Value << t.eta;
        out << YAML::Key << "omega0_over_2pi_khz" << YAML::Value << khz(t.omega0);
        out << YAML::Key << "t_max_us" << YAML::Value << us(t.t_max);
        out << YAML::Key << "t_step_us" << YAML::Value << us(t.t_step);
        out << YAML::Key << "shots" << YAML::Value << t.shots;
        out << YAML::EndMap;
        out << YAML::Key << "fit" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "n_max" << YAML::Value << t.fit_n_max;
        out << YAML::Key << "truncation" << YAML::Value << (t.truncation == Truncation::Aic ? "aic" : "fixed");
        out << YAML::EndMap;
        break;
    }
    case ScenarioType::Feasibility: {
        const auto& f = c.feasibility;
        out << YAML::Key << "omega_over_2pi_hz" << YAML::Value << f.omega / two_pi;
        out << YAML::Key << "omega_q_over_2pi_hz" << YAML::Value << f.omega_q / two_pi;
        if (f.omega_p) out << YAML::Key << "omega_p_over_2pi_hz" << YAML::Value << *f.omega_p / two_pi;
        out << YAML::Key << "amplitude_m" << YAML::Value << f.amplitude;
        out << YAML::Key << "g0_over_2pi_hz" << YAML::Value << f.g0 / two_pi;
        out << YAML::Key << "lifetime_s" << YAML::Value << f.lifetime;
        break;
    }
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// Equality up to the rounding introduced by unit conversion.
inline bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b, double rel = 1e-12) {
    return serialize(a) == serialize(b) || [&] {
        // Fall back to a numeric comparison of the canonical trees.
        const YAML::Node x = YAML::Load(serialize(a)), y = YAML::Load(serialize(b));
        std::function<bool(const YAML::Node&, const YAML::Node&)> same = [&](const YAML::Node& p, const YAML::Node& q) {
            if (p.Type() != q.Type()) return false;
            if (p.IsScalar()) {
                if (p.Scalar() == q.Scalar()) return true;
                try {
                    const double u = p.as<double>(), v = q.as<double>();
                    return std::abs(u - v) <= rel * std::max({1.0, std::abs(u), std::abs(v)});
                } catch (const YAML::Exception&) {
                    return false;
                }
            }
            if (p.IsSequence()) {
                if (p.size() != q.size()) return false;
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (!same(p[i], q[i])) return false;
                return true;
            }
            if (p.IsMap()) {
                if (p.size() != q.size()) return false;
                for (auto it = p.begin(); it != p.end(); ++it) {
                    const auto key = it->first.as<std::string>();
                    if (!q[key] || !same(it->second, q[key])) return false;
                }
                return true;
            }
            return true;
        };
        return same(x, y);
    }();
}

}  // namespace oscunruh::cli
