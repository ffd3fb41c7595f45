// hilbert.hpp
// Dense operators and states on the control (x) detector (x) mode space.
//
// Basis ordering is control-major: index = (c * 2 + d) * fock_dim + n, with
// the detector ordered (|g>, |e>) and sigma_z = diag(-1, +1) in that order.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "oscunruh/errors.hpp"

namespace oscunruh {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SystemLayout {
    static constexpr int detector_levels = 2;

    int control_levels = 1;
    int fock_dim = 10;

    static SystemLayout single(int fock_dim = 10) { return checked({1, fock_dim}); }
    static SystemLayout superposed(int fock_dim = 10) { return checked({2, fock_dim}); }

    int dim() const { return control_levels * detector_levels * fock_dim; }

    int index(int control, int detector, int n) const {
        return (control * detector_levels + detector) * fock_dim + n;
    }

    void validate() const {
        if (control_levels != 1 && control_levels != 2)
            throw InvalidArgument("control_levels must be 1 or 2, got " +
                                  std::to_string(control_levels));
        if (fock_dim < 2)
            throw InvalidArgument("fock_dim must be >= 2, got " + std::to_string(fock_dim));
    }

    friend bool operator==(const SystemLayout&, const SystemLayout&) = default;

private:
    static SystemLayout checked(SystemLayout l) {
        l.validate();
        return l;
    }
};

enum class Subsystem { Control, Detector, Mode };
enum class Pauli { X, Y, Z, Plus, Minus };
enum class ControlBasis { Zero, One, Plus, Minus };
enum class DetectorLevel { Ground = 0, Excited = 1 };

namespace detail {

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool hermitian_within(const Matrix& m, double tol) {
    const double scale = std::max(1.0, max_abs(m));
    return max_abs(m - m.adjoint()) <= tol * scale;
}

}  // namespace detail

// Square complex matrix with a cached Hermiticity flag. Immutable once built.
class OperatorMatrix {
public:
    static constexpr double hermitian_tolerance = 1e-12;

    explicit OperatorMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw InvalidArgument("operator matrix must be square");
        hermitian_ = detail::hermitian_within(m_, hermitian_tolerance);
    }

    static OperatorMatrix identity(int dim) { return OperatorMatrix(Matrix::Identity(dim, dim)); }
    static OperatorMatrix zero(int dim) { return OperatorMatrix(Matrix::Zero(dim, dim)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    bool is_hermitian() const { return hermitian_; }
    cd operator()(int row, int col) const { return m_(row, col); }

    OperatorMatrix adjoint() const { return OperatorMatrix(m_.adjoint()); }

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return OperatorMatrix(a.m_ + b.m_);
    }
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return OperatorMatrix(a.m_ - b.m_);
    }
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return OperatorMatrix(a.m_ * b.m_);
    }
    friend OperatorMatrix operator*(cd s, const OperatorMatrix& a) { return OperatorMatrix(s * a.m_); }
    friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return OperatorMatrix(s * a.m_); }

private:
    static void check_same(const OperatorMatrix& a, const OperatorMatrix& b) {
        if (a.dim() != b.dim())
            throw InvalidArgument("operator dimension mismatch: " + std::to_string(a.dim()) +
                                  " vs " + std::to_string(b.dim()));
    }

    Matrix m_;
    bool hermitian_ = false;
};

inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a * b - b * a;
}

inline OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
    const Matrix& x = a.matrix();
    const Matrix& y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return OperatorMatrix(std::move(out));
}

inline OperatorMatrix annihilation(int fock_dim) {
    if (fock_dim < 2)
        throw InvalidArgument("fock_dim must be >= 2, got " + std::to_string(fock_dim));
    Matrix a = Matrix::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return OperatorMatrix(std::move(a));
}

inline OperatorMatrix creation(int fock_dim) { return annihilation(fock_dim).adjoint(); }

inline OperatorMatrix number(int fock_dim) {
    if (fock_dim < 2)
        throw InvalidArgument("fock_dim must be >= 2, got " + std::to_string(fock_dim));
    Matrix n = Matrix::Zero(fock_dim, fock_dim);
    for (int k = 0; k < fock_dim; ++k) n(k, k) = static_cast<double>(k);
    return OperatorMatrix(std::move(n));
}

// Detector operators in the (|g>, |e>) basis; sigma_+ |g> = |e>.
inline OperatorMatrix pauli(Pauli which) {
    Matrix m = Matrix::Zero(2, 2);
    const cd i{0.0, 1.0};
    switch (which) {
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, i, -i, 0; break;
    case Pauli::Z: m << -1, 0, 0, 1; break;
    case Pauli::Plus: m(1, 0) = 1; break;
    case Pauli::Minus: m(0, 1) = 1; break;
    }
    return OperatorMatrix(std::move(m));
}

inline int subsystem_dim(const SystemLayout& layout, Subsystem s) {
    switch (s) {
    case Subsystem::Control: return layout.control_levels;
    case Subsystem::Detector: return SystemLayout::detector_levels;
    case Subsystem::Mode: return layout.fock_dim;
    }
    return 0;
}

// Lift a single-factor operator to the full space with identities elsewhere.
inline OperatorMatrix embed(const SystemLayout& layout, Subsystem subsystem, const OperatorMatrix& op) {
    layout.validate();
    if (op.dim() != subsystem_dim(layout, subsystem))
        throw InvalidArgument("embed: operator dimension " + std::to_string(op.dim()) +
                              " does not match subsystem dimension " +
                              std::to_string(subsystem_dim(layout, subsystem)));
    const auto control = subsystem == Subsystem::Control
                             ? op
                             : OperatorMatrix::identity(layout.control_levels);
    const auto detector = subsystem == Subsystem::Detector ? op : OperatorMatrix::identity(2);
    const auto mode = subsystem == Subsystem::Mode ? op : OperatorMatrix::identity(layout.fock_dim);
    return kron(kron(control, detector), mode);
}

inline Eigen::Vector2cd control_ket(ControlBasis which) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (which) {
    case ControlBasis::Zero: return {1.0, 0.0};
    case ControlBasis::One: return {0.0, 1.0};
    case ControlBasis::Plus: return {r, r};
    case ControlBasis::Minus: return {r, -r};
    }
    return {};
}

// |i_c><i_c| (x) I (x) I
inline OperatorMatrix projector_control(ControlBasis which, const SystemLayout& layout) {
    if (layout.control_levels != 2)
        throw InvalidArgument("projector_control requires a two-branch control layout");
    const Eigen::Vector2cd k = control_ket(which);
    return embed(layout, Subsystem::Control, OperatorMatrix(k * k.adjoint()));
}

// Pure vector or density matrix on a SystemLayout. Validated on construction.
class QuantumState {
public:
    static constexpr double default_tolerance = 1e-9;

    static QuantumState pure(const SystemLayout& layout, Vector psi,
                             double tol = default_tolerance) {
        layout.validate();
        if (psi.size() != layout.dim())
            throw InvalidArgument("state vector size " + std::to_string(psi.size()) +
                                  " does not match layout dimension " +
                                  std::to_string(layout.dim()));
        if (std::abs(psi.norm() - 1.0) > tol)
            throw InvalidArgument("pure state is not normalized (norm " +
                                  std::to_string(psi.norm()) + ")");
        return QuantumState(layout, std::move(psi));
    }

    static QuantumState density(const SystemLayout& layout, Matrix rho,
                                double tol = default_tolerance) {
        layout.validate();
        if (rho.rows() != layout.dim() || rho.cols() != layout.dim())
            throw InvalidArgument("density matrix shape does not match layout dimension " +
                                  std::to_string(layout.dim()));
        if (!detail::hermitian_within(rho, tol))
            throw InvalidArgument("density matrix is not Hermitian");
        if (std::abs(rho.trace() - cd{1.0, 0.0}) > tol)
            throw InvalidArgument("density matrix trace is not 1");
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol)
            throw InvalidArgument("density matrix has a negative eigenvalue " +
                                  std::to_string(es.eigenvalues().minCoeff()));
        return QuantumState(layout, std::move(rho));
    }

    static QuantumState basis(const SystemLayout& layout, int control, DetectorLevel level, int n) {
        layout.validate();
        if (control < 0 || control >= layout.control_levels || n < 0 || n >= layout.fock_dim)
            throw InvalidArgument("basis state index out of range");
        Vector psi = Vector::Zero(layout.dim());
        psi(layout.index(control, static_cast<int>(level), n)) = 1.0;
        return QuantumState(layout, std::move(psi));
    }

    const SystemLayout& layout() const { return layout_; }
    int dim() const { return layout_.dim(); }
    bool is_pure() const { return std::holds_alternative<Vector>(data_); }

    const Vector& vector() const {
        if (!is_pure()) throw InvalidArgument("state is a density matrix, not a pure vector");
        return std::get<Vector>(data_);
    }

    // Density matrix view; computed as |psi><psi| for pure states.
    Matrix density_matrix() const {
        if (is_pure()) {
            const Vector& v = std::get<Vector>(data_);
            return v * v.adjoint();
        }
        return std::get<Matrix>(data_);
    }

    QuantumState to_density() const { return QuantumState(layout_, density_matrix()); }

    // Diagonal of the density matrix in the product basis.
    Eigen::VectorXd populations() const {
        if (is_pure()) return std::get<Vector>(data_).cwiseAbs2();
        return std::get<Matrix>(data_).diagonal().real();
    }

private:
    QuantumState(const SystemLayout& layout, Vector v) : layout_(layout), data_(std::move(v)) {}
    QuantumState(const SystemLayout& layout, Matrix m) : layout_(layout), data_(std::move(m)) {}

    SystemLayout layout_;
    std::variant<Vector, Matrix> data_;
};

// <psi|O|psi> or Tr(rho O) for Hermitian O.
inline double expectation(const QuantumState& state, const OperatorMatrix& op) {
    if (op.dim() != state.dim())
        throw InvalidArgument("expectation: operator dimension " + std::to_string(op.dim()) +
                              " does not match state dimension " + std::to_string(state.dim()));
    if (!op.is_hermitian()) throw InvalidArgument("expectation: operator is not Hermitian");
    cd value;
    if (state.is_pure()) {
        const Vector& psi = state.vector();
        value = psi.dot(op.matrix() * psi);
    } else {
        // Tr(rho O) = sum_jk rho_jk O_kj
        value = state.density_matrix().cwiseProduct(op.matrix().transpose()).sum();
    }
    if (std::abs(value.imag()) > 1e-9)
        throw NumericalInconsistency("expectation value has imaginary part " +
                                     std::to_string(value.imag()));
    return value.real();
}

// p_n proportional to (nbar / (1 + nbar))^n, renormalized on the truncated ladder.
inline std::vector<double> thermal_populations(double nbar, int fock_dim) {
    if (!(nbar >= 0.0)) throw InvalidArgument("thermal occupation must be >= 0");
    if (fock_dim < 2)
        throw InvalidArgument("fock_dim must be >= 2, got " + std::to_string(fock_dim));
    std::vector<double> p(fock_dim, 0.0);
    const double ratio = nbar / (1.0 + nbar);
    double weight = 1.0, total = 0.0;
    for (int n = 0; n < fock_dim; ++n) {
        p[n] = weight;
        total += weight;
        weight *= ratio;
    }
    for (double& x : p) x /= total;
    return p;
}

// Initial control-branch preparation. Mixture is the classical 50/50 mixture
// of |0_c> and |1_c>.
enum class ControlPreparation { Zero, One, Plus, Minus, Mixture };

// Control state (x) |g> (x) thermal(nbar). Returns a pure vector whenever the
// result is pure (nbar == 0 and no classical mixture).
inline QuantumState ground_state(const SystemLayout& layout,
                                 ControlPreparation control = ControlPreparation::Zero,
                                 double nbar = 0.0) {
    layout.validate();
    if (layout.control_levels == 1 && control != ControlPreparation::Zero)
        throw InvalidArgument("single-trajectory layout only supports the |0_c> preparation");

    Eigen::MatrixXcd control_rho(layout.control_levels, layout.control_levels);
    Eigen::VectorXcd control_amp(layout.control_levels);
    bool control_pure = true;
    if (layout.control_levels == 1) {
        control_amp << 1.0;
    } else {
        switch (control) {
        case ControlPreparation::Zero: control_amp = control_ket(ControlBasis::Zero); break;
        case ControlPreparation::One: control_amp = control_ket(ControlBasis::One); break;
        case ControlPreparation::Plus: control_amp = control_ket(ControlBasis::Plus); break;
        case ControlPreparation::Minus: control_amp = control_ket(ControlBasis::Minus); break;
        case ControlPreparation::Mixture: control_pure = false; break;
        }
    }
    if (control_pure)
        control_rho = control_amp * control_amp.adjoint();
    else
        control_rho = 0.5 * Eigen::MatrixXcd::Identity(2, 2);

    Eigen::MatrixXcd detector = Eigen::MatrixXcd::Zero(2, 2);
    detector(0, 0) = 1.0;

    const auto p = thermal_populations(nbar, layout.fock_dim);
    if (control_pure && nbar == 0.0) {
        Vector psi = Vector::Zero(layout.dim());
        for (int c = 0; c < layout.control_levels; ++c) psi(layout.index(c, 0, 0)) = control_amp(c);
        return QuantumState::pure(layout, std::move(psi));
    }
    Eigen::MatrixXcd mode = Eigen::MatrixXcd::Zero(layout.fock_dim, layout.fock_dim);
    for (int n = 0; n < layout.fock_dim; ++n) mode(n, n) = p[n];
    const auto rho = kron(kron(OperatorMatrix(control_rho), OperatorMatrix(detector)),
                          OperatorMatrix(mode));
    return QuantumState::density(layout, rho.matrix());
}

// |g><g| (x) thermal(nbar) on the single-trajectory layout.
inline QuantumState thermal_state(double nbar, int fock_dim) {
    if (!(nbar >= 0.0)) throw InvalidArgument("thermal occupation must be >= 0");
    const auto layout = SystemLayout::single(fock_dim);
    return ground_state(layout, ControlPreparation::Zero, nbar).to_density();
}

}  // namespace oscunruh
