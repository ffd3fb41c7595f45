// dynamics.hpp
// Time-dependent detector-cavity Hamiltonians for one or two superposed
// trajectories, fixed-step fourth-order propagation of pure states and of
// the Lindblad master equation, and the projected observables.
//
// Propagation runs in the frame rotating with the diagonal of the static
// Hamiltonian: psi = D(t) y with D(t) = exp(-i diag(H_static) t). The phases
// are applied exactly and RK4 integrates only the remaining coupling, which
// is what keeps norm and trace drift far below tolerance at the default step.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oscunruh/errors.hpp"
#include "oscunruh/hilbert.hpp"
#include "oscunruh/model.hpp"
#include "oscunruh/trajectory.hpp"

namespace oscunruh {

using SparseMatrix = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

struct LindbladSpec {
    double t2 = std::numeric_limits<double>::infinity();  // seconds
    double heating_rate = 0.0;                            // quanta per second
    double initial_nbar = 0.0;
    std::vector<double> dephasing_weights = {1.0, 1.0};  // per control branch

    void validate() const {
        if (!(t2 > 0.0)) throw InvalidArgument("T2 must be positive or infinite");
        if (!(heating_rate >= 0.0)) throw InvalidArgument("heating rate must be >= 0");
        if (!(initial_nbar >= 0.0)) throw InvalidArgument("initial thermal occupation must be >= 0");
        for (double w : dephasing_weights)
            if (!std::isfinite(w)) throw InvalidArgument("dephasing weights must be finite");
    }

    // sigma_z jump rate giving exp(-t / T2) decay of detector coherences.
    double dephasing_rate() const { return std::isinf(t2) ? 0.0 : 1.0 / (2.0 * t2); }

    friend bool operator==(const LindbladSpec&, const LindbladSpec&) = default;
};

// H(t) = H_static + sum_k envelope_k(t) * coupling_k.
struct TimeDependentHamiltonian {
    struct Term {
        OperatorMatrix coupling;
        std::function<double(double)> envelope;
    };

    SystemLayout layout;
    OperatorMatrix static_part;
    std::vector<Term> terms;
    // Largest angular frequency in the problem; bounds the admissible step.
    double max_frequency = 0.0;

    OperatorMatrix operator()(double t) const {
        Matrix h = static_part.matrix();
        for (const auto& term : terms) h += term.envelope(t) * term.coupling.matrix();
        return OperatorMatrix(std::move(h));
    }
};

namespace detail {

inline OperatorMatrix free_hamiltonian(const ModelParams& params, const SystemLayout& layout) {
    return params.omega_p * embed(layout, Subsystem::Mode, number(layout.fock_dim)) +
           (0.5 * params.omega_q) * embed(layout, Subsystem::Detector, pauli(Pauli::Z));
}

// sigma_x (a + a^dagger) restricted to one control branch (or the whole
// space for a single-trajectory layout).
inline OperatorMatrix dipole_coupling(const SystemLayout& layout, std::optional<int> branch) {
    const auto x = pauli(Pauli::X);
    const auto a = annihilation(layout.fock_dim);
    const auto q = a + a.adjoint();
    if (!branch) return embed(layout, Subsystem::Detector, x) * embed(layout, Subsystem::Mode, q);
    Matrix p = Matrix::Zero(2, 2);
    p(*branch, *branch) = 1.0;
    return kron(kron(OperatorMatrix(p), x), q);
}

inline double largest_frequency(const ModelParams& params, std::initializer_list<double> drives) {
    double w = std::max({params.omega_p, params.omega_q, params.omega_p + params.omega_q});
    for (double d : drives) w = std::max(w, d);
    return w;
}

}  // namespace detail

// omega_p N + (omega_q / 2) sigma_z + g0 sin(k x(t)) sigma_x (a + a^dagger)
inline TimeDependentHamiltonian hamiltonian_single(const ModelParams& params,
                                                   const TrajectorySpec& traj,
                                                   const SystemLayout& layout) {
    params.validate();
    if (layout.control_levels != 1)
        throw InvalidArgument("hamiltonian_single requires a single-trajectory layout");
    TimeDependentHamiltonian h{layout, detail::free_hamiltonian(params, layout), {}, 0.0};
    h.terms.push_back({params.g0 * detail::dipole_coupling(layout, std::nullopt),
                       [traj](double t) { return traj.modulation(t); }});
    h.max_frequency = detail::largest_frequency(params, {traj.drive_frequency()});
    return h;
}

inline OperatorMatrix hamiltonian_single(const ModelParams& params, const TrajectorySpec& traj,
                                         double t, const SystemLayout& layout) {
    return hamiltonian_single(params, traj, layout)(t);
}

// omega_p N + (omega_q / 2) sigma_z + sum_i g0 sin(k x_i(t)) |i_c><i_c| sigma_x (a + a^dagger)
inline TimeDependentHamiltonian hamiltonian_superposed(const ModelParams& params,
                                                       const TrajectorySpec& traj0,
                                                       const TrajectorySpec& traj1,
                                                       const SystemLayout& layout) {
    params.validate();
    if (layout.control_levels != 2)
        throw InvalidArgument("hamiltonian_superposed requires a two-branch control layout");
    TimeDependentHamiltonian h{layout, detail::free_hamiltonian(params, layout), {}, 0.0};
    h.terms.push_back({params.g0 * detail::dipole_coupling(layout, 0),
                       [traj0](double t) { return traj0.modulation(t); }});
    h.terms.push_back({params.g0 * detail::dipole_coupling(layout, 1),
                       [traj1](double t) { return traj1.modulation(t); }});
    h.max_frequency =
        detail::largest_frequency(params, {traj0.drive_frequency(), traj1.drive_frequency()});
    return h;
}

inline OperatorMatrix hamiltonian_superposed(const ModelParams& params, const TrajectorySpec& traj0,
                                             const TrajectorySpec& traj1, double t,
                                             const SystemLayout& layout) {
    return hamiltonian_superposed(params, traj0, traj1, layout)(t);
}

// Zero Hamiltonian (pure dissipation runs).
inline TimeDependentHamiltonian null_hamiltonian(const SystemLayout& layout) {
    return {layout, OperatorMatrix::zero(layout.dim()), {}, 0.0};
}

// Upper bound 2 pi / (200 omega_max), shrunk so it divides sample_interval.
inline double default_time_step(double max_frequency, double sample_interval) {
    if (!(sample_interval > 0.0)) throw InvalidArgument("sample interval must be positive");
    if (max_frequency <= 0.0) return sample_interval;
    const double bound = 2.0 * std::numbers::pi / (200.0 * max_frequency);
    return sample_interval / std::ceil(sample_interval / bound * (1.0 - 1e-12));
}

// ---------------------------------------------------------------------------
// Observables

// Named Hermitian observables for a layout. Two-branch layouts add the
// unnormalised projected expectations <P_i (x) O> for i in {0, 1, +, -}.
class ObservableSet {
public:
    explicit ObservableSet(const SystemLayout& layout) : layout_(layout) {
        const auto sz = embed(layout, Subsystem::Detector, pauli(Pauli::Z));
        const auto n = embed(layout, Subsystem::Mode, number(layout.fock_dim));
        add("sigma_z", sz);
        add("n", n);
        if (layout.control_levels == 2) {
            const std::pair<const char*, ControlBasis> branches[] = {
                {"P0", ControlBasis::Zero},
                {"P1", ControlBasis::One},
                {"Pplus", ControlBasis::Plus},
                {"Pminus", ControlBasis::Minus}};
            for (const auto& [name, basis] : branches) {
                const auto p = projector_control(basis, layout);
                add(std::string(name), p);
                add(std::string(name) + "_sigma_z", p * sz);
                add(std::string(name) + "_n", p * n);
            }
        }
    }

    const SystemLayout& layout() const { return layout_; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, op] : ops_) out.push_back(name);
        if (layout_.control_levels == 2) {
            out.push_back("coh_sigma_z");
            out.push_back("coh_n");
        }
        return out;
    }

    bool has(const std::string& name) const {
        const auto all = names();
        return std::find(all.begin(), all.end(), name) != all.end();
    }

    std::map<std::string, double> evaluate(const QuantumState& state) const {
        if (!(state.layout() == layout_))
            throw InvalidArgument("observables: state layout does not match");
        std::map<std::string, double> out;
        for (const auto& [name, op] : ops_) out[name] = expectation(state, op);
        if (layout_.control_levels == 2) {
            out["coh_sigma_z"] = out["Pplus_sigma_z"] - out["Pminus_sigma_z"];
            out["coh_n"] = out["Pplus_n"] - out["Pminus_n"];
        }
        return out;
    }

private:
    void add(std::string name, OperatorMatrix op) { ops_.emplace_back(std::move(name), std::move(op)); }

    SystemLayout layout_;
    std::vector<std::pair<std::string, OperatorMatrix>> ops_;
};

inline std::map<std::string, double> observables(const QuantumState& state) {
    return ObservableSet(state.layout()).evaluate(state);
}

struct CoherenceSplit {
    double mix = 0.0;
    double coh = 0.0;
};

// mix = <P_+ O> + <P_- O>, coh = <P_+ O> - <P_- O>, so <P_+- O> = (mix +- coh) / 2.
inline CoherenceSplit coherence_decompose(const QuantumState& state, const OperatorMatrix& op) {
    const auto& layout = state.layout();
    if (layout.control_levels != 2)
        throw InvalidArgument("coherence_decompose requires a two-branch control layout");
    const double plus = expectation(state, projector_control(ControlBasis::Plus, layout) * op);
    const double minus = expectation(state, projector_control(ControlBasis::Minus, layout) * op);
    return {plus + minus, plus - minus};
}

// Population in the two highest Fock levels.
inline double truncation_leakage(const SystemLayout& layout, const Eigen::VectorXd& populations) {
    double sum = 0.0;
    for (int c = 0; c < layout.control_levels; ++c)
        for (int d = 0; d < 2; ++d)
            for (int n = layout.fock_dim - 2; n < layout.fock_dim; ++n)
                sum += populations(layout.index(c, d, n));
    return sum;
}

// ---------------------------------------------------------------------------
// Propagation

inline constexpr double leakage_threshold = 1e-6;
inline constexpr double drift_failure_threshold = 1e-6;

struct EvolutionOptions {
    double t_final = 0.0;
    double dt = 0.0;               // 0 selects default_time_step
    double sample_interval = 2e-6;
    bool store_states = false;
};

struct EvolutionResult {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> traces;
    std::vector<QuantumState> states;
    double dt = 0.0;
    double leakage_max = 0.0;
    bool truncation_warning = false;
    double norm_drift = 0.0;           // max |<psi|psi> - 1| or |Tr rho - 1|
    double hermiticity_error = 0.0;    // Lindblad only
    double min_eigenvalue = 0.0;       // Lindblad only, over sample times

    const std::vector<double>& trace(const std::string& name) const {
        auto it = traces.find(name);
        if (it == traces.end()) throw InvalidArgument("no observable trace named '" + name + "'");
        return it->second;
    }
};

namespace detail {

struct SampleGrid {
    double dt;
    long steps_per_sample;
    long samples;  // excluding t = 0
};

inline SampleGrid make_grid(const EvolutionOptions& opt, double max_frequency) {
    if (!(opt.t_final >= 0.0)) throw InvalidArgument("t_final must be >= 0");
    if (!(opt.sample_interval > 0.0)) throw InvalidArgument("sample interval must be positive");
    const double dt = opt.dt > 0.0 ? opt.dt : default_time_step(max_frequency, opt.sample_interval);
    if (max_frequency > 0.0) {
        const double bound = 2.0 * std::numbers::pi / (200.0 * max_frequency);
        if (dt > bound * (1.0 + 1e-9))
            throw InvalidArgument("time step " + std::to_string(dt) +
                                  " exceeds 2pi/(200 omega_max) = " + std::to_string(bound));
    }
    const double ratio = opt.sample_interval / dt;
    const long steps = std::lround(ratio);
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-6)
        throw InvalidArgument("time step must divide the sample interval");
    const long samples = static_cast<long>(std::floor(opt.t_final / opt.sample_interval + 1e-9));
    return {opt.sample_interval / static_cast<double>(steps), steps, samples};
}

inline SparseMatrix to_sparse(const Matrix& m) {
    SparseMatrix s = m.sparseView(cd{1.0, 0.0}, 1e-300);
    s.makeCompressed();
    return s;
}

// Generator in the rotating frame of diag(H_static):
//   lab-frame remainder R(t) = offdiag(H_static) + sum_k c_k(t) V_k.
class FrameGenerator {
public:
    explicit FrameGenerator(const TimeDependentHamiltonian& h) {
        const Matrix& s = h.static_part.matrix();
        energies_ = s.diagonal().real();
        Matrix off = s;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 0.0) static_offdiag_ = to_sparse(off);
        for (const auto& term : h.terms) {
            couplings_.push_back(to_sparse(term.coupling.matrix()));
            envelopes_.push_back(term.envelope);
        }
    }

    Vector phases(double t) const {
        Vector d(energies_.size());
        for (Eigen::Index j = 0; j < d.size(); ++j)
            d(j) = std::polar(1.0, -energies_(j) * t);
        return d;
    }

    // Apply -i R(t) to a lab-frame vector or matrix.
    template <class Dense>
    Dense apply_minus_i(double t, const Dense& x) const {
        Dense out = Dense::Zero(x.rows(), x.cols());
        if (static_offdiag_) out.noalias() += *static_offdiag_ * x;
        for (std::size_t k = 0; k < couplings_.size(); ++k) {
            const double c = envelopes_[k](t);
            if (c != 0.0) out.noalias() += c * (couplings_[k] * x);
        }
        return cd{0.0, -1.0} * out;
    }

private:
    Eigen::VectorXd energies_;
    std::optional<SparseMatrix> static_offdiag_;
    std::vector<SparseMatrix> couplings_;
    std::vector<std::function<double(double)>> envelopes_;
};

template <class State, class Rhs>
void rk4_step(State& y, double t, double h, const Rhs& f) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void record(EvolutionResult& result, const ObservableSet& obs, double t,
                   const QuantumState& state, bool store) {
    result.times.push_back(t);
    for (const auto& [name, value] : obs.evaluate(state)) result.traces[name].push_back(value);
    if (store) result.states.push_back(state);
}

inline void finish(EvolutionResult& result) {
    result.truncation_warning = result.leakage_max >= leakage_threshold;
}

}  // namespace detail

// Pure-state propagation of i d|psi>/dt = H(t)|psi>. Norm is not renormalised;
// drift is reported and a drift above 1e-6 throws IntegrationFailure.
inline EvolutionResult evolve_unitary(const QuantumState& state0, const TimeDependentHamiltonian& h,
                                      const EvolutionOptions& opt) {
    if (!state0.is_pure()) throw InvalidArgument("evolve_unitary requires a pure initial state");
    if (!(state0.layout() == h.layout))
        throw InvalidArgument("initial state layout does not match the Hamiltonian layout");
    const auto grid = detail::make_grid(opt, h.max_frequency);
    const detail::FrameGenerator gen(h);
    const ObservableSet obs(h.layout);
    const auto& layout = h.layout;

    auto rhs = [&](double t, const Vector& y) -> Vector {
        const Vector d = gen.phases(t);
        const Vector lab = d.cwiseProduct(y);
        return d.conjugate().cwiseProduct(gen.apply_minus_i(t, lab));
    };

    EvolutionResult result;
    result.dt = grid.dt;
    Vector y = state0.vector();
    detail::record(result, obs, 0.0, state0, opt.store_states);
    result.leakage_max = truncation_leakage(layout, y.cwiseAbs2());
    for (long s = 1; s <= grid.samples; ++s) {
        for (long k = 0; k < grid.steps_per_sample; ++k) {
            const double t = ((s - 1) * grid.steps_per_sample + k) * grid.dt;
            detail::rk4_step(y, t, grid.dt, rhs);
            const Eigen::VectorXd pops = y.cwiseAbs2();
            result.leakage_max = std::max(result.leakage_max, truncation_leakage(layout, pops));
            result.norm_drift = std::max(result.norm_drift, std::abs(pops.sum() - 1.0));
        }
        if (result.norm_drift > drift_failure_threshold)
            throw IntegrationFailure("norm drift " + std::to_string(result.norm_drift) +
                                     " exceeds " + std::to_string(drift_failure_threshold));
        const double t = s * opt.sample_interval;
        const Vector lab = gen.phases(t).cwiseProduct(y);
        detail::record(result, obs, t, QuantumState::pure(layout, lab, drift_failure_threshold),
                       opt.store_states);
    }
    detail::finish(result);
    return result;
}

// Generic H(t) given as a callable; integrated directly in the lab frame.
inline EvolutionResult evolve_unitary(const QuantumState& state0,
                                      const std::function<OperatorMatrix(double)>& h,
                                      const EvolutionOptions& opt) {
    if (!state0.is_pure()) throw InvalidArgument("evolve_unitary requires a pure initial state");
    if (!(opt.dt > 0.0)) throw InvalidArgument("a generic Hamiltonian requires an explicit dt");
    const auto grid = detail::make_grid(opt, 0.0);
    const auto& layout = state0.layout();
    const ObservableSet obs(layout);
    auto rhs = [&](double t, const Vector& y) -> Vector {
        const auto ht = h(t);
        if (ht.dim() != layout.dim())
            throw InvalidArgument("Hamiltonian dimension does not match the state");
        return cd{0.0, -1.0} * (ht.matrix() * y);
    };
    EvolutionResult result;
    result.dt = grid.dt;
    Vector y = state0.vector();
    detail::record(result, obs, 0.0, state0, opt.store_states);
    result.leakage_max = truncation_leakage(layout, y.cwiseAbs2());
    for (long s = 1; s <= grid.samples; ++s) {
        for (long k = 0; k < grid.steps_per_sample; ++k) {
            const double t = ((s - 1) * grid.steps_per_sample + k) * grid.dt;
            detail::rk4_step(y, t, grid.dt, rhs);
            const Eigen::VectorXd pops = y.cwiseAbs2();
            result.leakage_max = std::max(result.leakage_max, truncation_leakage(layout, pops));
            result.norm_drift = std::max(result.norm_drift, std::abs(pops.sum() - 1.0));
        }
        if (result.norm_drift > drift_failure_threshold)
            throw IntegrationFailure("norm drift " + std::to_string(result.norm_drift) +
                                     " exceeds " + std::to_string(drift_failure_threshold));
        detail::record(result, obs, s * opt.sample_interval,
                       QuantumState::pure(layout, y, drift_failure_threshold), opt.store_states);
    }
    detail::finish(result);
    return result;
}

struct JumpOperator {
    OperatorMatrix op;
    double rate;
};

// Dephasing (sum_i w_i P_i (x) sigma_z at 1 / (2 T2)) and symmetric heating
// (a^dagger and a, each at the heating rate).
inline std::vector<JumpOperator> jump_operators(const SystemLayout& layout, const LindbladSpec& lind) {
    lind.validate();
    std::vector<JumpOperator> out;
    if (lind.dephasing_rate() > 0.0) {
        Matrix weights = Matrix::Zero(layout.control_levels, layout.control_levels);
        for (int c = 0; c < layout.control_levels; ++c)
            weights(c, c) = c < static_cast<int>(lind.dephasing_weights.size())
                                ? lind.dephasing_weights[c]
                                : 1.0;
        const auto l = kron(kron(OperatorMatrix(weights), pauli(Pauli::Z)),
                            OperatorMatrix::identity(layout.fock_dim));
        out.push_back({l, lind.dephasing_rate()});
    }
    if (lind.heating_rate > 0.0) {
        const auto a = embed(layout, Subsystem::Mode, annihilation(layout.fock_dim));
        out.push_back({a.adjoint(), lind.heating_rate});
        out.push_back({a, lind.heating_rate});
    }
    return out;
}

// Fourth-order fixed-step integration of
//   d rho/dt = -i[H, rho] + sum_i gamma_i (L_i rho L_i^dagger - {L_i^dagger L_i, rho} / 2).
inline EvolutionResult evolve_lindblad(const QuantumState& rho0, const TimeDependentHamiltonian& h,
                                       const LindbladSpec& lind, const EvolutionOptions& opt) {
    if (!(rho0.layout() == h.layout))
        throw InvalidArgument("initial state layout does not match the Hamiltonian layout");
    const auto& layout = h.layout;
    const auto grid = detail::make_grid(opt, h.max_frequency);
    const detail::FrameGenerator gen(h);
    const ObservableSet obs(layout);

    std::vector<SparseMatrix> jumps;
    std::vector<double> rates;
    Matrix k_sum = Matrix::Zero(layout.dim(), layout.dim());
    for (const auto& j : jump_operators(layout, lind)) {
        jumps.push_back(detail::to_sparse(j.op.matrix()));
        rates.push_back(j.rate);
        k_sum += j.rate * (j.op.adjoint() * j.op).matrix();
    }
    const SparseMatrix half_k = detail::to_sparse(0.5 * k_sum);

    // Lab-frame derivative without the diagonal static part.
    auto lab_rhs = [&](double t, const Matrix& rho) -> Matrix {
        Matrix x = gen.apply_minus_i(t, rho);
        x.noalias() -= half_k * rho;
        Matrix out = x + x.adjoint();
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const Matrix lr = jumps[i] * rho;
            out.noalias() += rates[i] * (jumps[i] * lr.adjoint());
        }
        return out;
    };
    auto frame_phases = [&](double t) -> Matrix {
        const Vector d = gen.phases(t);
        return d * d.adjoint();
    };
    auto rhs = [&](double t, const Matrix& y) -> Matrix {
        const Matrix f = frame_phases(t);
        const Matrix lab = f.cwiseProduct(y);
        return f.conjugate().cwiseProduct(lab_rhs(t, lab));
    };

    EvolutionResult result;
    result.dt = grid.dt;
    Matrix y = rho0.density_matrix();
    auto sample_checks = [&](const Matrix& rho) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        result.min_eigenvalue = std::min(result.min_eigenvalue, es.eigenvalues().minCoeff());
        result.hermiticity_error =
            std::max(result.hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    };
    sample_checks(y);
    detail::record(result, obs, 0.0, rho0.is_pure() ? rho0.to_density() : rho0, opt.store_states);
    result.leakage_max = truncation_leakage(layout, y.diagonal().real());
    for (long s = 1; s <= grid.samples; ++s) {
        for (long k = 0; k < grid.steps_per_sample; ++k) {
            const double t = ((s - 1) * grid.steps_per_sample + k) * grid.dt;
            detail::rk4_step(y, t, grid.dt, rhs);
            const Eigen::VectorXd pops = y.diagonal().real();
            result.leakage_max = std::max(result.leakage_max, truncation_leakage(layout, pops));
            result.norm_drift = std::max(result.norm_drift, std::abs(y.trace() - cd{1.0, 0.0}));
        }
        if (result.norm_drift > drift_failure_threshold)
            throw IntegrationFailure("trace drift " + std::to_string(result.norm_drift) +
                                     " exceeds " + std::to_string(drift_failure_threshold));
        const double t = s * opt.sample_interval;
        const Matrix lab = frame_phases(t).cwiseProduct(y);
        sample_checks(lab);
        detail::record(result, obs, t,
                       QuantumState::density(layout, lab, drift_failure_threshold),
                       opt.store_states);
    }
    detail::finish(result);
    return result;
}

}  // namespace oscunruh
