#ifndef QSF_TYPES_HPP
#define QSF_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qsf {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr Complex kI{0.0, 1.0};

/// Absolute tolerance used by all predicate checks.
struct Tolerance {
    double abs_tol = 1e-10;
};

class DimensionMismatch : public std::runtime_error {
  public:
    explicit DimensionMismatch(const std::string& what)
        : std::runtime_error(what) {}
};

class PreconditionError : public std::runtime_error {
  public:
    explicit PreconditionError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Dense complex square matrix with dimension metadata. Carrier for
/// Hamiltonians, coupling operators, projectors and densities alike.
struct Operator {
    Mat m;

    Operator() = default;
    explicit Operator(Mat mat) : m(std::move(mat)) {
        if (m.rows() != m.cols())
            throw DimensionMismatch("Operator requires a square matrix");
    }

    Eigen::Index dim() const { return m.rows(); }

    static Operator identity(Eigen::Index n) {
        return Operator(Mat::Identity(n, n));
    }
    static Operator zero(Eigen::Index n) {
        return Operator(Mat::Zero(n, n));
    }

    Operator adjoint() const { return Operator(m.adjoint()); }

    bool is_hermitian(double tol = 1e-10) const {
        return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }
    bool is_projector(double tol = 1e-10) const {
        return is_hermitian(tol) &&
               (m * m - m).cwiseAbs().maxCoeff() <= tol;
    }
};

inline Operator operator+(const Operator& a, const Operator& b) {
    return Operator(a.m + b.m);
}
inline Operator operator-(const Operator& a, const Operator& b) {
    return Operator(a.m - b.m);
}
inline Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("operator product: dimension mismatch");
    return Operator(a.m * b.m);
}
inline Operator operator*(Complex c, const Operator& a) {
    return Operator(c * a.m);
}

/// Pure-state amplitude vector; the unnormalized variant carries the
/// linear-equation weight through its squared norm.
struct StateVector {
    Vec v;

    StateVector() = default;
    explicit StateVector(Vec amplitudes) : v(std::move(amplitudes)) {}

    Eigen::Index dim() const { return v.size(); }
    double norm2() const { return v.squaredNorm(); }

    StateVector normalized() const {
        double n = v.norm();
        if (n <= 0.0)
            throw PreconditionError("cannot normalize a zero state");
        return StateVector(v / n);
    }

    /// Rank-1 projector |v><v| (state assumed normalized).
    Operator projector() const { return Operator(v * v.adjoint()); }
};

/// Positive, trace-one Hermitian operator.
struct DensityOperator {
    Operator op;

    DensityOperator() = default;
    explicit DensityOperator(Operator o, double tol = 1e-8) : op(std::move(o)) {
        validate(tol);
    }

    Eigen::Index dim() const { return op.dim(); }

    void validate(double tol) const {
        if (!op.is_hermitian(tol))
            throw PreconditionError("density operator not Hermitian");
        if (std::abs(op.m.trace().real() - 1.0) > tol ||
            std::abs(op.m.trace().imag()) > tol)
            throw PreconditionError("density operator trace != 1");
        Eigen::SelfAdjointEigenSolver<Mat> es(op.m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol)
            throw PreconditionError("density operator has negative eigenvalue");
    }

    static DensityOperator pure(const StateVector& psi) {
        return DensityOperator(psi.normalized().projector());
    }
    static DensityOperator maximally_mixed(Eigen::Index n) {
        return DensityOperator(Operator(Mat::Identity(n, n) / double(n)));
    }
};

// Pauli matrices and elementary qubit states.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

}  // namespace qsf

#endif
