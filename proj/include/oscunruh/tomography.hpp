// tomography.hpp
// Red/blue sideband scans of a phonon population table, their constrained
// least-squares inversion, and the control-branch readout transforms
// (+/- basis rotation and shelving).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oscunruh/errors.hpp"
#include "oscunruh/hilbert.hpp"
#include "oscunruh/nnls.hpp"

namespace oscunruh {

// Populations P_{g,n}, P_{e,n} for n = 0..n_max, plus the sin-quadrature terms
// S_n = 2 Re(c_{g,n}^* c_{e,m}) of the sideband-coupled pairs:
//   blue_coherence[n] for (g,n)-(e,n+1), n = 0..n_max-1
//   red_coherence[n-1] for (g,n)-(e,n-1), n = 1..n_max
struct PhononDistribution {
    std::vector<double> p_g;
    std::vector<double> p_e;
    std::vector<double> blue_coherence;
    std::vector<double> red_coherence;

    static PhononDistribution zeros(int n_max) {
        if (n_max < 1) throw InvalidArgument("phonon table needs n_max >= 1");
        const auto size = static_cast<std::size_t>(n_max);
        return {std::vector<double>(size + 1, 0.0), std::vector<double>(size + 1, 0.0),
                std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)};
    }

    static PhononDistribution vacuum(int n_max) {
        auto d = zeros(n_max);
        d.p_g[0] = 1.0;
        return d;
    }

    int n_max() const { return static_cast<int>(p_g.size()) - 1; }

    double total() const {
        return std::accumulate(p_g.begin(), p_g.end(), 0.0) +
               std::accumulate(p_e.begin(), p_e.end(), 0.0);
    }

    void validate(double tol = 1e-6) const {
        const auto n = p_g.size();
        if (n < 2 || p_e.size() != n || blue_coherence.size() != n - 1 ||
            red_coherence.size() != n - 1)
            throw InvalidArgument("phonon table has inconsistent sizes");
        for (double p : p_g)
            if (p < -tol || p > 1.0 + tol) throw InvalidArgument("population outside [0, 1]");
        for (double p : p_e)
            if (p < -tol || p > 1.0 + tol) throw InvalidArgument("population outside [0, 1]");
        if (std::abs(total() - 1.0) > tol)
            throw InvalidArgument("populations do not sum to 1 (sum " + std::to_string(total()) + ")");
    }
};

enum class Sideband { Red, Blue };

inline std::string to_string(Sideband b) { return b == Sideband::Red ? "red" : "blue"; }

struct SidebandScan {
    Sideband branch = Sideband::Blue;
    double eta = 0.0;     // Lamb-Dicke parameter
    double omega0 = 0.0;  // carrier Rabi angular frequency, rad/s
    std::vector<double> times;  // pulse lengths, s
    std::vector<double> p_g;
    std::vector<int> shots;  // per point; empty for noiseless data

    void validate() const {
        if (times.size() != p_g.size()) throw InvalidArgument("scan times and p_g differ in length");
        if (!shots.empty() && shots.size() != times.size())
            throw InvalidArgument("scan shots and times differ in length");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
                throw InvalidArgument("scan times must be nonnegative and increasing");
            if (p_g[i] < 0.0 || p_g[i] > 1.0) throw InvalidArgument("scan p_g outside [0, 1]");
        }
    }
};

// Generalised Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
inline double laguerre(int n, double alpha, double x) {
    if (n < 0) throw InvalidArgument("laguerre: degree must be >= 0");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

// Omega_{n,n+1} = eta Omega0 exp(-eta^2 / 2) L_n^1(eta^2) / sqrt(n + 1)
inline double sideband_rabi_frequency(int n, double eta, double omega0) {
    if (n < 0) throw InvalidArgument("sideband_rabi_frequency: n must be >= 0");
    if (!(eta > 0.0 && eta < 0.5))
        throw InvalidArgument("sideband_rabi_frequency: eta must lie in (0, 0.5)");
    const double x = eta * eta;
    return eta * omega0 * std::exp(-0.5 * x) * laguerre(n, 1.0, x) / std::sqrt(n + 1.0);
}

namespace detail {

// Parameter layout of the linear scan model:
//   [P_g(0..N), P_e(0..N), S_blue(0..N-1), S_red(1..N)]
struct ScanModel {
    int n_max;
    int num_populations() const { return 2 * (n_max + 1); }
    int num_params() const { return num_populations() + 2 * n_max; }
    int pg(int n) const { return n; }
    int pe(int n) const { return n_max + 1 + n; }
    int s_blue(int n) const { return num_populations() + n; }
    int s_red(int n) const { return num_populations() + n_max + (n - 1); }
};

// Row of the design matrix: p_g(t) = row . theta.
inline Eigen::RowVectorXd scan_row(const ScanModel& m, Sideband branch, double eta, double omega0,
                                   double t) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m.num_params());
    const int n_max = m.n_max;
    if (branch == Sideband::Blue) {
        // (g,n) <-> (e,n+1) at Omega_{n,n+1}; |e,0> is uncoupled.
        for (int n = 0; n <= n_max; ++n) {
            const double w = sideband_rabi_frequency(n, eta, omega0) * t;
            row(m.pg(n)) += 0.5 * (1.0 + std::cos(w));
            if (n + 1 <= n_max) {
                row(m.pe(n + 1)) += 0.5 * (1.0 - std::cos(w));
                row(m.s_blue(n)) += 0.5 * std::sin(w);
            }
        }
    } else {
        // (g,n) <-> (e,n-1) at Omega_{n-1,n}; |g,0> is dark.
        row(m.pg(0)) += 1.0;
        for (int n = 1; n <= n_max + 1; ++n) {
            const double w = sideband_rabi_frequency(n - 1, eta, omega0) * t;
            if (n <= n_max) {
                row(m.pg(n)) += 0.5 * (1.0 + std::cos(w));
                row(m.s_red(n)) += 0.5 * std::sin(w);
            }
            row(m.pe(n - 1)) += 0.5 * (1.0 - std::cos(w));
        }
    }
    return row;
}

inline Eigen::VectorXd pack(const PhononDistribution& d) {
    const ScanModel m{d.n_max()};
    Eigen::VectorXd theta(m.num_params());
    for (int n = 0; n <= m.n_max; ++n) {
        theta(m.pg(n)) = d.p_g[n];
        theta(m.pe(n)) = d.p_e[n];
    }
    for (int n = 0; n < m.n_max; ++n) {
        theta(m.s_blue(n)) = d.blue_coherence[n];
        theta(m.s_red(n + 1)) = d.red_coherence[n];
    }
    return theta;
}

inline PhononDistribution unpack(const ScanModel& m, const Eigen::VectorXd& theta) {
    auto d = PhononDistribution::zeros(m.n_max);
    for (int n = 0; n <= m.n_max; ++n) {
        d.p_g[n] = theta(m.pg(n));
        d.p_e[n] = theta(m.pe(n));
    }
    for (int n = 0; n < m.n_max; ++n) {
        d.blue_coherence[n] = theta(m.s_blue(n));
        d.red_coherence[n] = theta(m.s_red(n + 1));
    }
    return d;
}

// Euclidean projection onto {x >= 0, sum x = 1}.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0, shift = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - candidate > 0.0) shift = candidate;
    }
    return (v.array() - shift).max(0.0).matrix();
}

}  // namespace detail

struct ShotNoise {
    int shots = 100;
    std::uint64_t seed = 1;
};

// p_g(t) = sum over sideband pairs [P_+ + P_- cos(Omega t) + S sin(Omega t)] / 2,
// optionally resampled as binomial counts / shots.
inline SidebandScan synthesize_scan(const PhononDistribution& dist, Sideband branch, double eta,
                                    double omega0, const std::vector<double>& times,
                                    std::optional<ShotNoise> noise = std::nullopt) {
    dist.validate();
    const detail::ScanModel m{dist.n_max()};
    const Eigen::VectorXd theta = detail::pack(dist);
    SidebandScan scan{branch, eta, omega0, times, {}, {}};
    std::mt19937_64 rng(noise ? noise->seed : 0);
    for (double t : times) {
        const double p = std::clamp(detail::scan_row(m, branch, eta, omega0, t).dot(theta), 0.0, 1.0);
        if (noise) {
            std::binomial_distribution<int> draw(noise->shots, p);
            scan.p_g.push_back(static_cast<double>(draw(rng)) / noise->shots);
            scan.shots.push_back(noise->shots);
        } else {
            scan.p_g.push_back(p);
        }
    }
    scan.validate();
    return scan;
}

// sum_n n (P_{g,n} + P_{e,n}), or restricted to one detector level.
inline double mean_phonon(const PhononDistribution& dist,
                          std::optional<DetectorLevel> level = std::nullopt) {
    double sum = 0.0;
    for (int n = 0; n <= dist.n_max(); ++n) {
        if (!level || *level == DetectorLevel::Ground) sum += n * dist.p_g[n];
        if (!level || *level == DetectorLevel::Excited) sum += n * dist.p_e[n];
    }
    return sum;
}

struct FitResult {
    PhononDistribution distribution;
    std::vector<double> sigma_g;  // per-population standard errors
    std::vector<double> sigma_e;
    double residual_norm = 0.0;
    double mean_phonon = 0.0;
    double mean_phonon_sigma = 0.0;
    double condition_number = 0.0;
    int iterations = 0;
    int selected_n_max = 0;
};

inline constexpr double max_fit_condition = 1e8;

namespace detail {

// Constrained fit at one truncation. Seeded by NNLS (S split into positive and
// negative parts, normalisation as a heavily weighted row), refined by
// accelerated projected gradient, then polished by an equality-constrained
// solve on the final free set. A tiny penalty on <N> selects the
// lower-excitation point along flat directions.
inline FitResult fit_truncated(const SidebandScan& red, const SidebandScan& blue, int n_max) {
    const detail::ScanModel model{n_max};
    const int p = model.num_params();
    const int np = model.num_populations();
    const auto m = static_cast<Eigen::Index>(red.times.size() + blue.times.size());
    if (m < p) throw IllConditionedFit("fewer scan points than fit parameters", 0.0);

    Eigen::MatrixXd a(m, p);
    Eigen::VectorXd b(m);
    Eigen::Index row = 0;
    for (const SidebandScan* scan : {&red, &blue})
        for (std::size_t i = 0; i < scan->times.size(); ++i, ++row) {
            a.row(row) = detail::scan_row(model, scan->branch, scan->eta, scan->omega0, scan->times[i]);
            b(row) = scan->p_g[i];
        }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                : std::numeric_limits<double>::infinity();
    if (!(cond <= max_fit_condition))
        throw IllConditionedFit("sideband design is rank deficient (condition number " +
                                    std::to_string(cond) + "); extend the pulse-length grid",
                                cond);

    Eigen::VectorXd n_weight = Eigen::VectorXd::Zero(p);
    for (int n = 0; n <= n_max; ++n) n_weight(model.pg(n)) = n_weight(model.pe(n)) = n;

    // NNLS seed.
    const int ns = p - np;
    const double w = 100.0 * std::sqrt(static_cast<double>(m));
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(m + 1, np + 2 * ns);
    aug.topLeftCorner(m, np) = a.leftCols(np);
    aug.block(0, np, m, ns) = a.rightCols(ns);
    aug.block(0, np + ns, m, ns) = -a.rightCols(ns);
    aug.block(m, 0, 1, np).setConstant(w);
    Eigen::VectorXd baug(m + 1);
    baug << b, w;
    const auto seed = nnls(aug, baug);
    Eigen::VectorXd theta(p);
    theta << seed.x.head(np), seed.x.segment(np, ns) - seed.x.tail(ns);

    // Projected gradient (FISTA with restart).
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::VectorXd atb = a.transpose() * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata, Eigen::EigenvaluesOnly);
    const double lipschitz = es.eigenvalues().maxCoeff();
    const double tie_break = 1e-12 * lipschitz;
    auto project = [&](Eigen::VectorXd v) {
        v.head(np) = detail::project_simplex(v.head(np));
        return v;
    };
    auto objective = [&](const Eigen::VectorXd& v) {
        return 0.5 * (a * v - b).squaredNorm() + tie_break * n_weight.dot(v);
    };
    theta = project(theta);
    Eigen::VectorXd extrap = theta;
    double momentum = 1.0;
    double f_prev = objective(theta);
    int iterations = 0;
    for (; iterations < 20000; ++iterations) {
        const Eigen::VectorXd grad = ata * extrap - atb + tie_break * n_weight;
        const Eigen::VectorXd next = project(extrap - grad / lipschitz);
        const double f_next = objective(next);
        const double step = (next - theta).norm();
        if (f_next > f_prev) {  // restart
            momentum = 1.0;
            extrap = theta;
            continue;
        }
        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        extrap = next + ((momentum - 1.0) / momentum_next) * (next - theta);
        theta = next;
        momentum = momentum_next;
        f_prev = f_next;
        if (step < 1e-14) break;
    }

    // Free set: positive populations and all coherences.
    std::vector<int> free;
    for (int j = 0; j < p; ++j)
        if (j >= np || theta(j) > 1e-10) free.push_back(j);
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd af(m, nf);
    Eigen::VectorXd cf = Eigen::VectorXd::Zero(nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
        af.col(k) = a.col(free[k]);
        if (free[k] < np) cf(k) = 1.0;
    }

    // Equality-constrained polish on the free set via the KKT system.
    {
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
        kkt.topLeftCorner(nf, nf) = af.transpose() * af;
        kkt.block(0, nf, nf, 1) = cf;
        kkt.block(nf, 0, 1, nf) = cf.transpose();
        Eigen::VectorXd rhs(nf + 1);
        for (Eigen::Index k = 0; k < nf; ++k) rhs(k) = af.col(k).dot(b) - tie_break * n_weight(free[k]);
        rhs(nf) = 1.0;
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(p);
        bool feasible = sol.allFinite();
        for (Eigen::Index k = 0; k < nf && feasible; ++k) {
            candidate(free[k]) = sol(k);
            if (free[k] < np && sol(k) < 0.0) feasible = false;
        }
        if (feasible && objective(candidate) <= objective(theta) + 1e-15) theta = candidate;
    }

    FitResult out;
    out.distribution = detail::unpack(model, theta);
    out.residual_norm = (a * theta - b).norm();
    out.mean_phonon = n_weight.dot(theta);
    out.condition_number = cond;
    out.iterations = iterations;
    out.sigma_g.assign(n_max + 1, 0.0);
    out.sigma_e.assign(n_max + 1, 0.0);

    // Local quadratic model restricted to the constraint surface.
    const Eigen::Index dof = nf - 1;
    const double sigma2 =
        out.residual_norm * out.residual_norm / static_cast<double>(std::max<Eigen::Index>(1, m - dof));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cf.transpose());
    const Eigen::MatrixXd z = lu.kernel();
    if (z.cols() > 0 && cf.sum() > 0.0) {
        const Eigen::MatrixXd reduced = z.transpose() * af.transpose() * af * z;
        const Eigen::MatrixXd cov = sigma2 * z * reduced.ldlt().solve(z.transpose());
        Eigen::VectorXd nf_weight(nf);
        for (Eigen::Index k = 0; k < nf; ++k) {
            nf_weight(k) = n_weight(free[k]);
            const int j = free[k];
            const double s = std::sqrt(std::max(0.0, cov(k, k)));
            if (j < np) {
                if (j <= n_max)
                    out.sigma_g[j] = s;
                else
                    out.sigma_e[j - n_max - 1] = s;
            }
        }
        out.mean_phonon_sigma = std::sqrt(std::max(0.0, nf_weight.dot(cov * nf_weight)));
    }
    return out;
}

inline PhononDistribution pad(const PhononDistribution& d, int n_max) {
    auto out = PhononDistribution::zeros(n_max);
    std::copy(d.p_g.begin(), d.p_g.end(), out.p_g.begin());
    std::copy(d.p_e.begin(), d.p_e.end(), out.p_e.begin());
    std::copy(d.blue_coherence.begin(), d.blue_coherence.end(), out.blue_coherence.begin());
    std::copy(d.red_coherence.begin(), d.red_coherence.end(), out.red_coherence.begin());
    return out;
}

}  // namespace detail

enum class Truncation { Fixed, Aic };

// Combined red + blue fit over {P_g, P_e, S} with P >= 0 and sum P = 1.
// With Truncation::Aic the point estimate comes from the truncation
// 1..n_max with the lowest Akaike criterion; uncertainties always come from
// the full n_max model.
inline FitResult fit_distribution(const SidebandScan& red, const SidebandScan& blue, int n_max = 5,
                                  Truncation rule = Truncation::Aic) {
    red.validate();
    blue.validate();
    if (red.branch != Sideband::Red || blue.branch != Sideband::Blue)
        throw InvalidArgument("fit_distribution expects a red scan and a blue scan");
    if (red.eta != blue.eta || red.omega0 != blue.omega0)
        throw InvalidArgument("red and blue scans must share eta and Omega0");
    if (n_max < 1) throw InvalidArgument("fit_distribution: n_max must be >= 1");

    FitResult full = detail::fit_truncated(red, blue, n_max);
    full.selected_n_max = n_max;
    if (rule == Truncation::Fixed || n_max == 1) return full;

    const auto m = static_cast<double>(red.times.size() + blue.times.size());
    auto aic = [&](const FitResult& f, int k) {
        const double rss = std::max(f.residual_norm * f.residual_norm, m * 1e-18);
        return m * std::log(rss / m) + 2.0 * detail::ScanModel{k}.num_params();
    };
    // Walk down from n_max so the smallest truncation wins ties.
    FitResult best = full;
    double best_score = aic(full, n_max);
    for (int k = n_max - 1; k >= 1; --k) {
        FitResult f;
        try {
            f = detail::fit_truncated(red, blue, k);
        } catch (const IllConditionedFit&) {
            continue;
        }
        const double score = aic(f, k);
        if (score <= best_score) {
            best_score = score;
            f.selected_n_max = k;
            best = std::move(f);
        }
    }
    FitResult out = full;
    out.distribution = detail::pad(best.distribution, n_max);
    out.residual_norm = best.residual_norm;
    out.mean_phonon = best.mean_phonon;
    out.iterations = best.iterations;
    out.selected_n_max = best.selected_n_max;
    return out;
}

// ---------------------------------------------------------------------------
// Control-branch readout

// Control rotation |+_c> -> |0_c>, |-_c> -> -|1_c>, identity on detector and mode.
inline OperatorMatrix basis_transform_pm_operator(const SystemLayout& layout) {
    if (layout.control_levels != 2)
        throw InvalidArgument("basis_transform_pm requires a two-branch control layout");
    const double r = 1.0 / std::sqrt(2.0);
    Matrix u(2, 2);
    u << r, r, -r, r;
    return embed(layout, Subsystem::Control, OperatorMatrix(std::move(u)));
}

inline QuantumState basis_transform_pm(const QuantumState& state) {
    const auto u = basis_transform_pm_operator(state.layout());
    if (state.is_pure()) return QuantumState::pure(state.layout(), u.matrix() * state.vector(), 1e-6);
    return QuantumState::density(state.layout(),
                                 u.matrix() * state.density_matrix() * u.matrix().adjoint(), 1e-6);
}

// Population p_{i_c, level} left after shelving every other level, mode traced
// out. Plus/Minus branches are read through basis_transform_pm first.
inline double shelving_projection(const QuantumState& state, ControlBasis branch, DetectorLevel level) {
    const auto& layout = state.layout();
    if (layout.control_levels != 2)
        throw InvalidArgument("shelving_projection requires a two-branch control layout");
    if (branch == ControlBasis::Plus || branch == ControlBasis::Minus)
        return shelving_projection(basis_transform_pm(state),
                                   branch == ControlBasis::Plus ? ControlBasis::Zero : ControlBasis::One,
                                   level);
    const int c = branch == ControlBasis::Zero ? 0 : 1;
    const Eigen::VectorXd pops = state.populations();
    double sum = 0.0;
    for (int n = 0; n < layout.fock_dim; ++n) sum += pops(layout.index(c, static_cast<int>(level), n));
    return sum;
}

}  // namespace oscunruh
