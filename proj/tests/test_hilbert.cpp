#include <gtest/gtest.h>

#include <random>

#include "oscunruh/hilbert.hpp"

using namespace oscunruh;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Vector random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cd{g(rng), g(rng)};
    return v.normalized();
}

}  // namespace

TEST(Annihilation, SmallestLadder) {
    const auto a = annihilation(2);
    EXPECT_EQ(a(0, 1), cd(1.0, 0.0));
    EXPECT_EQ(a(0, 0), cd(0.0, 0.0));
    EXPECT_EQ(a(1, 0), cd(0.0, 0.0));
    EXPECT_EQ(a(1, 1), cd(0.0, 0.0));
}

TEST(Annihilation, ThreeLevels) {
    const auto a = annihilation(3);
    EXPECT_DOUBLE_EQ(a(0, 1).real(), 1.0);
    EXPECT_DOUBLE_EQ(a(1, 2).real(), std::sqrt(2.0));
    int nonzero = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) nonzero += a(i, j) != cd{};
    EXPECT_EQ(nonzero, 2);
}

TEST(Annihilation, CreationIsEntrywiseTranspose) {
    const auto a = annihilation(10);
    const auto ad = creation(10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) EXPECT_EQ(ad(i, j), std::conj(a(j, i)));
}

TEST(Annihilation, RejectsTinyLadder) {
    EXPECT_THROW(annihilation(1), InvalidArgument);
    EXPECT_THROW(annihilation(0), InvalidArgument);
}

TEST(Annihilation, NumberIsCreationTimesAnnihilation) {
    for (int d = 2; d <= 32; ++d) {
        const auto n = number(d);
        const auto product = creation(d) * annihilation(d);
        EXPECT_LT(max_abs(n.matrix() - product.matrix()), 1e-12) << "fock_dim " << d;
    }
}

TEST(Pauli, SignConventionAndAlgebra) {
    const auto z = pauli(Pauli::Z);
    EXPECT_EQ(z(0, 0), cd(-1.0, 0.0));
    EXPECT_EQ(z(1, 1), cd(1.0, 0.0));

    const auto p = pauli(Pauli::Plus);
    const auto m = pauli(Pauli::Minus);
    EXPECT_LT(max_abs((p * m + m * p).matrix() - Matrix::Identity(2, 2)), 1e-15);
    EXPECT_LT(max_abs(pauli(Pauli::X).matrix() - (p + m).matrix()), 1e-15);

    // sigma_+ |g> = |e>
    Vector g(2);
    g << 1.0, 0.0;
    const Vector e = p.matrix() * g;
    EXPECT_EQ(e(1), cd(1.0, 0.0));

    // [sigma_x, sigma_y] = 2 i sigma_z
    const auto comm = commutator(pauli(Pauli::X), pauli(Pauli::Y));
    EXPECT_LT(max_abs(comm.matrix() - cd{0.0, 2.0} * z.matrix()), 1e-15);
    for (auto w : {Pauli::X, Pauli::Y, Pauli::Z}) EXPECT_TRUE(pauli(w).is_hermitian());
    EXPECT_FALSE(p.is_hermitian());
}

TEST(Embed, ModeNumberSpectrum) {
    const auto layout = SystemLayout::single(2);
    const auto n = embed(layout, Subsystem::Mode, number(2));
    Eigen::SelfAdjointEigenSolver<Matrix> es(n.matrix());
    const Eigen::VectorXd ev = es.eigenvalues();
    ASSERT_EQ(ev.size(), 4);
    EXPECT_NEAR(ev(0), 0.0, 1e-14);
    EXPECT_NEAR(ev(1), 0.0, 1e-14);
    EXPECT_NEAR(ev(2), 1.0, 1e-14);
    EXPECT_NEAR(ev(3), 1.0, 1e-14);
}

TEST(Embed, ControlProjectorRank) {
    const auto layout = SystemLayout::superposed(2);
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    const auto lifted = embed(layout, Subsystem::Control, OperatorMatrix(p0));
    EXPECT_LT(max_abs((lifted * lifted).matrix() - lifted.matrix()), 1e-15);
    Eigen::FullPivLU<Matrix> lu(lifted.matrix());
    EXPECT_EQ(lu.rank(), 4);
}

TEST(Embed, DisjointFactorsCommute) {
    const auto layout = SystemLayout::superposed(5);
    const auto sz = embed(layout, Subsystem::Detector, pauli(Pauli::Z));
    const auto n = embed(layout, Subsystem::Mode, number(5));
    EXPECT_LT(max_abs(commutator(sz, n).matrix()), 1e-15);
}

TEST(Embed, DistributesOverProducts) {
    const auto layout = SystemLayout::superposed(6);
    const auto a = annihilation(6);
    const auto ad = creation(6);
    const auto lhs = embed(layout, Subsystem::Mode, a) * embed(layout, Subsystem::Mode, ad);
    const auto rhs = embed(layout, Subsystem::Mode, a * ad);
    EXPECT_LT(max_abs(lhs.matrix() - rhs.matrix()), 1e-12);

    const auto x = pauli(Pauli::X), y = pauli(Pauli::Y);
    const auto lhs2 = embed(layout, Subsystem::Detector, x) * embed(layout, Subsystem::Detector, y);
    EXPECT_LT(max_abs(lhs2.matrix() - embed(layout, Subsystem::Detector, x * y).matrix()), 1e-12);
}

TEST(Embed, DimensionMismatch) {
    const auto layout = SystemLayout::single(4);
    EXPECT_THROW(embed(layout, Subsystem::Mode, number(5)), InvalidArgument);
    EXPECT_THROW(embed(layout, Subsystem::Detector, number(4)), InvalidArgument);
}

TEST(ProjectorControl, CompletenessAndOrthogonality) {
    const auto layout = SystemLayout::superposed(3);
    const Matrix id = Matrix::Identity(layout.dim(), layout.dim());
    const auto p0 = projector_control(ControlBasis::Zero, layout);
    const auto p1 = projector_control(ControlBasis::One, layout);
    const auto pp = projector_control(ControlBasis::Plus, layout);
    const auto pm = projector_control(ControlBasis::Minus, layout);
    EXPECT_LT(max_abs((p0 + p1).matrix() - id), 1e-15);
    EXPECT_LT(max_abs((pp + pm).matrix() - id), 1e-15);
    EXPECT_LT(max_abs((pp * pm).matrix()), 1e-15);
    for (const auto* p : {&p0, &p1, &pp, &pm}) EXPECT_TRUE(p->is_hermitian());
}

TEST(ProjectorControl, OverlapOfPlusWithZero) {
    const auto layout = SystemLayout::superposed(3);
    const auto plus = ground_state(layout, ControlPreparation::Plus);
    EXPECT_NEAR(expectation(plus, projector_control(ControlBasis::Zero, layout)), 0.5, 1e-15);
}

TEST(ProjectorControl, RejectsSingleLayout) {
    EXPECT_THROW(projector_control(ControlBasis::Zero, SystemLayout::single(3)), InvalidArgument);
}

TEST(Expectation, GroundState) {
    const auto layout = SystemLayout::single(10);
    const auto g0 = QuantumState::basis(layout, 0, DetectorLevel::Ground, 0);
    EXPECT_DOUBLE_EQ(expectation(g0, embed(layout, Subsystem::Detector, pauli(Pauli::Z))), -1.0);
    EXPECT_DOUBLE_EQ(expectation(g0, embed(layout, Subsystem::Mode, number(10))), 0.0);
}

TEST(Expectation, RejectsNonHermitian) {
    const auto layout = SystemLayout::single(3);
    const auto s = QuantumState::basis(layout, 0, DetectorLevel::Ground, 0);
    EXPECT_THROW(expectation(s, embed(layout, Subsystem::Mode, annihilation(3))), InvalidArgument);
}

TEST(Expectation, PureAndDensityAgree) {
    std::mt19937_64 rng(7);
    const auto layout = SystemLayout::superposed(4);
    const auto psi = QuantumState::pure(layout, random_state(layout.dim(), rng));
    const auto rho = psi.to_density();
    const auto op = projector_control(ControlBasis::Plus, layout) *
                    embed(layout, Subsystem::Mode, number(4));
    EXPECT_NEAR(expectation(psi, op), expectation(rho, op), 1e-13);
}

TEST(ThermalState, ZeroTemperatureIsVacuum) {
    const auto s = thermal_state(0.0, 6);
    const auto pops = s.populations();
    EXPECT_DOUBLE_EQ(pops(0), 1.0);
    EXPECT_DOUBLE_EQ(pops.sum(), 1.0);
}

TEST(ThermalState, ResidualOccupation) {
    // Oracle: geometric series p_n = (1 - r) r^n / (1 - r^D), r = nbar / (1 + nbar).
    const double nbar = 0.05;
    const int d = 10;
    const double r = nbar / (1.0 + nbar);
    const double norm = (1.0 - std::pow(r, d)) / (1.0 - r);
    double mean = 0.0;
    for (int n = 0; n < d; ++n) mean += n * std::pow(r, n) / norm;

    const auto s = thermal_state(nbar, d);
    const auto layout = s.layout();
    EXPECT_NEAR(s.populations()(0), 1.0 / norm, 1e-12);
    EXPECT_NEAR(s.populations()(0), 0.95238, 1e-5);
    const double n_exp = expectation(s, embed(layout, Subsystem::Mode, number(d)));
    EXPECT_NEAR(n_exp, mean, 1e-12);
    EXPECT_NEAR(n_exp, 0.05, 1e-4);
    EXPECT_NEAR(s.density_matrix().trace().real(), 1.0, 1e-15);
}

TEST(ThermalState, RejectsNegativeOccupation) {
    EXPECT_THROW(thermal_state(-0.1, 10), InvalidArgument);
}

TEST(QuantumState, ValidatesOnConstruction) {
    const auto layout = SystemLayout::single(3);
    Vector v = Vector::Zero(layout.dim());
    v(0) = 2.0;
    EXPECT_THROW(QuantumState::pure(layout, v), InvalidArgument);
    EXPECT_THROW(QuantumState::pure(layout, Vector::Zero(3)), InvalidArgument);

    Matrix rho = Matrix::Zero(layout.dim(), layout.dim());
    rho(0, 0) = 1.5;
    rho(1, 1) = -0.5;
    EXPECT_THROW(QuantumState::density(layout, rho), InvalidArgument);
    rho.setZero();
    rho(0, 0) = 1.0;
    rho(0, 1) = 0.3;
    EXPECT_THROW(QuantumState::density(layout, rho), InvalidArgument);
}

TEST(SystemLayout, Dimensions) {
    EXPECT_EQ(SystemLayout::single(10).dim(), 20);
    EXPECT_EQ(SystemLayout::superposed(10).dim(), 40);
    EXPECT_THROW(SystemLayout::single(1), InvalidArgument);
    SystemLayout bad{3, 4};
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(GroundState, ClassicalMixtureHasNoControlCoherence) {
    const auto layout = SystemLayout::superposed(4);
    const auto rho = ground_state(layout, ControlPreparation::Mixture);
    ASSERT_FALSE(rho.is_pure());
    const Matrix m = rho.density_matrix();
    EXPECT_DOUBLE_EQ(m(layout.index(0, 0, 0), layout.index(0, 0, 0)).real(), 0.5);
    EXPECT_DOUBLE_EQ(std::abs(m(layout.index(0, 0, 0), layout.index(1, 0, 0))), 0.0);
}
