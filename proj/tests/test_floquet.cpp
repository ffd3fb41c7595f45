#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oscunruh/floquet.hpp"
#include "oscunruh/trajectory.hpp"

using namespace oscunruh;

namespace {

constexpr double pi = std::numbers::pi;

// 40-term ascending series in long double.
double series_oracle(int n, double u) {
    long double half = u / 2.0L, sum = 0.0L;
    for (int k = 0; k < 40; ++k) {
        long double term = std::pow(-1.0L, k) * std::pow(half, 2 * k + n) /
                           (std::tgamma(static_cast<long double>(k + 1)) *
                            std::tgamma(static_cast<long double>(k + n + 1)));
        sum += term;
    }
    return static_cast<double>(sum);
}

ResonanceContext sum_resonance(double u_bar, double u) {
    const double w = 2.0 * pi * 150e3;
    return {2.0 * w, w, w, u_bar, u};
}

}  // namespace

TEST(Bessel, Origin) {
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
    EXPECT_EQ(bessel_j(1, 0.0), 0.0);
    EXPECT_EQ(bessel_j(5, 0.0), 0.0);
}

TEST(Bessel, FirstOrderAtTrajectoryAmplitudes) {
    EXPECT_NEAR(bessel_j(1, 1.5), series_oracle(1, 1.5), 1e-14);
    EXPECT_NEAR(bessel_j(1, 1.5), 0.557937, 1e-6);
    // u0 = 0.5822 halves the coupling of u1 = 1.5.
    EXPECT_NEAR(bessel_j(1, 0.5822), bessel_j(1, 1.5) / 2.0, 2e-4);
}

TEST(Bessel, MatchesStandardLibraryOnSupportedRange) {
    double worst = 0.0;
    for (int n = 0; n <= 30; ++n)
        for (double u = -50.0; u <= 50.0; u += 0.173) {
            const double expected = u >= 0.0 ? std::cyl_bessel_j(static_cast<double>(n), u)
                                             : std::pow(-1.0, n) * std::cyl_bessel_j(static_cast<double>(n), -u);
            worst = std::max(worst, std::abs(bessel_j(n, u) - expected));
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(Bessel, SeriesAndRecurrenceAgreeAtTheSplit) {
    for (int n = 0; n < 12; ++n) {
        const double u = bessel_series_limit;
        EXPECT_NEAR(detail::bessel_series(n, u), detail::bessel_backward(n, u), 1e-12) << n;
    }
}

TEST(Bessel, AdditionTheorem) {
    for (double u = 0.0; u <= 5.0; u += 0.25) {
        double sum = bessel_j(0, u) * bessel_j(0, u);
        for (int n = 1; n <= 40; ++n) sum += 2.0 * bessel_j(n, u) * bessel_j(n, u);
        EXPECT_NEAR(sum, 1.0, 1e-10) << "u = " << u;
    }
}

TEST(Bessel, RejectsOutOfRange) {
    EXPECT_THROW(bessel_j(0, 50.5), InvalidArgument);
    EXPECT_THROW(bessel_j(-1, 1.0), InvalidArgument);
}

TEST(JacobiAnger, NoAmplitudeLeavesOnlyDc) {
    const auto table = jacobi_anger_coeffs(0.7, 0.0, 5);
    EXPECT_NEAR(table[0].cos_coeff, std::sin(0.7), 1e-15);
    for (std::size_t h = 1; h < table.size(); ++h) {
        EXPECT_EQ(table[h].cos_coeff, 0.0);
        EXPECT_EQ(table[h].sin_coeff, 0.0);
    }
}

TEST(JacobiAnger, CavityCentreCoefficients) {
    const auto table = jacobi_anger_coeffs(2.0 * pi, 1.5, 10);
    EXPECT_NEAR(table[0].cos_coeff, 0.0, 1e-15);
    EXPECT_NEAR(table[1].sin_coeff, 2.0 * series_oracle(1, 1.5), 1e-13);
    EXPECT_NEAR(table[1].sin_coeff, 1.11587, 1e-5);
}

TEST(JacobiAnger, TruncatedSeriesReconstructsModulation) {
    for (double u : {0.3, 0.5822, 1.0, 1.5})
        for (double u_bar : {2.0 * pi, 0.4, pi / 2.0}) {
            const auto table = jacobi_anger_coeffs(u_bar, u, 25);
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double phase = 2.0 * pi * i / 1000.0;
                worst = std::max(worst, std::abs(evaluate_harmonics(table, phase) -
                                                 std::sin(u_bar + u * std::sin(phase))));
            }
            EXPECT_LT(worst, 1e-10) << "u = " << u << " u_bar = " << u_bar;
        }
}

TEST(EffectiveHamiltonian, SumResonanceAtCavityCentre) {
    const auto eff = effective_hamiltonian(sum_resonance(2.0 * pi, 1.5));
    ASSERT_FALSE(eff.off_resonance);
    ASSERT_EQ(eff.terms.size(), 2u);
    EXPECT_EQ(eff.terms[0].kind, CouplingKind::JC);
    EXPECT_NEAR(std::abs(eff.terms[0].amplitude), 0.0, 1e-15);
    EXPECT_EQ(eff.terms[1].kind, CouplingKind::AntiJC);
    EXPECT_NEAR(eff.terms[1].amplitude.real(), 0.0, 1e-15);
    EXPECT_NEAR(eff.terms[1].amplitude.imag(), series_oracle(1, 1.5), 1e-13);
    EXPECT_NEAR(eff.terms[1].amplitude.imag(), 0.557937, 1e-6);
}

TEST(EffectiveHamiltonian, NodeOfCosineSuppressesAntiJC) {
    const auto eff = effective_hamiltonian(sum_resonance(pi / 2.0, 1.5));
    EXPECT_NEAR(std::abs(eff.terms[1].amplitude), 0.0, 1e-15);
}

TEST(EffectiveHamiltonian, NoAmplitudeNoVacuumExcitation) {
    const double w = 2.0 * pi * 150e3;
    for (double u_bar : {0.3, 2.0 * pi, 1.0}) {
        EXPECT_EQ(std::abs(effective_hamiltonian({2.0 * w, w, w, u_bar, 0.0}).terms[1].amplitude), 0.0);
        EXPECT_EQ(std::abs(effective_hamiltonian({w, w, w, u_bar, 0.0}).terms[1].amplitude), 0.0);
    }
}

TEST(EffectiveHamiltonian, SingleResonanceUsesSecondHarmonic) {
    const double w = 2.0 * pi * 150e3;
    const auto eff = effective_hamiltonian({w, w, w, 0.8, 1.2});
    ASSERT_EQ(eff.terms.size(), 2u);
    EXPECT_NEAR(eff.terms[0].amplitude.real(), std::sin(0.8) * std::cyl_bessel_j(0.0, 1.2), 1e-13);
    EXPECT_NEAR(eff.terms[1].amplitude.real(), std::sin(0.8) * std::cyl_bessel_j(2.0, 1.2), 1e-13);
    EXPECT_EQ(eff.terms[1].source_harmonic, 2);
}

TEST(EffectiveHamiltonian, OffResonanceAndNonDegenerate) {
    const double w = 2.0 * pi * 150e3;
    const auto eff = effective_hamiltonian({1.37 * w, w, w, 0.8, 1.2});
    EXPECT_TRUE(eff.off_resonance);
    EXPECT_TRUE(eff.terms.empty());
    EXPECT_THROW(effective_hamiltonian({2.0 * w, w, 1.1 * w, 0.8, 1.2}), UnsupportedConfiguration);
}

TEST(EffectiveHamiltonian, AmplitudeParity) {
    for (double u : {0.2, 0.9, 1.7}) {
        const auto pos = effective_hamiltonian(sum_resonance(0.4, u));
        const auto neg = effective_hamiltonian(sum_resonance(0.4, -u));
        EXPECT_NEAR(pos.terms[1].amplitude.imag(), -neg.terms[1].amplitude.imag(), 1e-15);
        EXPECT_NEAR(pos.terms[0].amplitude.real(), neg.terms[0].amplitude.real(), 1e-15);
    }
}

TEST(EffectiveHamiltonian, AntiJCMatrixDrivesVacuumRabiOscillation) {
    const auto layout = SystemLayout::single(6);
    const double g0 = 2.0 * pi * 1.92e3;
    const auto eff = effective_hamiltonian(sum_resonance(2.0 * pi, 1.5));
    const auto h = effective_hamiltonian_matrix(eff.terms, g0, layout);
    ASSERT_TRUE(h.is_hermitian());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    const auto n_op = embed(layout, Subsystem::Mode, number(6));
    for (double t : {50e-6, 120e-6, 233e-6, 400e-6}) {
        const Eigen::VectorXcd phases =
            (es.eigenvalues().cast<cd>() * cd{0.0, -t}).array().exp().matrix();
        const Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        const Vector psi = u.col(layout.index(0, 0, 0));
        const double n = (psi.adjoint() * n_op.matrix() * psi)(0).real();
        EXPECT_NEAR(n, anti_jc_excitation(g0, 2.0 * pi, 1.5, t), 1e-10) << t;
    }
}

TEST(RabiPeriod, ReferenceParameters) {
    const ModelParams params;
    const double period = rabi_period_prediction(params, 2.0 * pi, 1.5);
    EXPECT_NEAR(period, pi / (params.g0 * series_oracle(1, 1.5)), 1e-12);
    EXPECT_NEAR(period * 1e6, 466.8, 0.1);
    const double slow = rabi_period_prediction(params, 2.0 * pi, 0.5822);
    EXPECT_NEAR(slow / period, 2.0, 2e-3);
}

TEST(RabiPeriod, VanishingAmplitude) {
    const ModelParams params;
    EXPECT_THROW(rabi_period_prediction(params, 2.0 * pi, 0.0), UndefinedPeriod);
    EXPECT_THROW(rabi_period_prediction(params, pi / 2.0, 1.5), UndefinedPeriod);
    // pi / (g0 u / 2) for small u.
    EXPECT_NEAR(rabi_period_prediction(params, 2.0 * pi, 1e-6), pi / (params.g0 * 0.5e-6), 1e-3);
}

TEST(DisplacementCondition, FirstMaximumOfJ1) {
    // Oracle: bisection on a finite-difference derivative of std::cyl_bessel_j(1, .).
    auto deriv = [](double u) {
        const double h = 1e-5;
        return (std::cyl_bessel_j(1.0, u + h) - std::cyl_bessel_j(1.0, u - h)) / (2.0 * h);
    };
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    const double u_star = displacement_condition();
    EXPECT_NEAR(u_star, 0.5 * (lo + hi), 1e-8);
    EXPECT_NEAR(u_star, 1.841184, 1e-6);
    EXPECT_LT(std::abs(bessel_j(0, u_star) - bessel_j(2, u_star)), 1e-9);
    EXPECT_LT(std::abs(bessel_j_derivative(1, u_star)), 1e-9);
}

TEST(RelativisticResonance, RestAndFastDetectors) {
    const double wq = 2.0 * pi * 50e6, k = 100.0, c = speed_of_light;
    EXPECT_DOUBLE_EQ(relativistic_resonance_residual(0.0, wq, k, c), wq + c * k);
    EXPECT_GT(relativistic_resonance_residual(0.99 * c, wq, k, c), 0.0);
    EXPECT_THROW(relativistic_resonance_residual(c, wq, k, c), InvalidArgument);
    EXPECT_THROW(relativistic_resonance_residual(1.5 * c, wq, k, c), InvalidArgument);
}

TEST(RelativisticResonance, NoSubluminalRoot) {
    const double c = speed_of_light;
    for (double wq : {1.0, 2.0 * pi * 150e3, 2.0 * pi * 50e6})
        for (double k : {1e-3, 1.0, 1e3})
            for (int i = 0; i <= 2000; ++i) {
                const double v = 0.999999 * c * i / 2000.0;
                EXPECT_GT(relativistic_resonance_residual(v, wq, k, c), 0.0);
            }
}
