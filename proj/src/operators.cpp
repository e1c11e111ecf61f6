#include "qsf/operators.hpp"

#include <cmath>

namespace qsf {

Operator pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m);
}

Operator pauli_y() {
    Mat m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return Operator(m);
}

Operator pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m);
}

Complex expectation(const Operator& a, const DensityOperator& rho) {
    if (a.dim() != rho.dim())
        throw DimensionMismatch("expectation: dimension mismatch");
    return (a.m * rho.op.m).trace();
}

double uncertainty(const Operator& a, const DensityOperator& rho, double tol) {
    if (!a.is_hermitian(tol))
        throw PreconditionError("uncertainty: operator not Hermitian");
    double mean = expectation(a, rho).real();
    double second = expectation(a * a, rho).real();
    double var = second - mean * mean;
    if (var < -tol)
        throw PreconditionError("uncertainty: negative variance, inconsistent inputs");
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("commutator: dimension mismatch");
    return Operator(a.m * b.m - b.m * a.m);
}

DensityOperator partial_trace_second(const DensityOperator& rho,
                                     Eigen::Index d1, Eigen::Index d2) {
    if (rho.dim() != d1 * d2)
        throw DimensionMismatch("partial_trace_second: dim != d1*d2");
    Mat out = Mat::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
        for (Eigen::Index j = 0; j < d1; ++j)
            for (Eigen::Index k = 0; k < d2; ++k)
                out(i, j) += rho.op.m(i * d2 + k, j * d2 + k);
    return DensityOperator(Operator(out));
}

double entropy_bits(const DensityOperator& rho, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.op.m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()(i);
        if (p < -tol)
            throw PreconditionError("entropy: negative eigenvalue");
        if (p > 0.0)
            s -= p * std::log2(p);
    }
    return s > 0.0 ? s : 0.0;
}

EigenSystem hermitian_eigensystem(const Operator& a, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.m);
    Eigen::Index n = a.dim();
    EigenSystem sys;
    sys.values.resize(n);
    sys.vectors.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        sys.values(i) = es.eigenvalues()(n - 1 - i);
        Vec v = es.eigenvectors().col(n - 1 - i);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (std::abs(v(k)) > tol) {
                v *= std::conj(v(k)) / std::abs(v(k));
                break;
            }
        }
        sys.vectors.col(i) = v;
    }
    return sys;
}

std::pair<Operator, Operator> oscillator_qp(Eigen::Index n, double hbar) {
    Mat a = Mat::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    Mat ad = a.adjoint();
    double c = std::sqrt(hbar / 2.0);
    Operator q(c * (a + ad));
    Operator p(kI * c * (ad - a));
    return {q, p};
}

}  // namespace qsf
