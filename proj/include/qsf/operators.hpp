#ifndef QSF_OPERATORS_HPP
#define QSF_OPERATORS_HPP

#include "qsf/types.hpp"

#include <utility>
#include <vector>

namespace qsf {

/// Tr(A rho). Real within tolerance when A is Hermitian.
Complex expectation(const Operator& a, const DensityOperator& rho);

/// sqrt(<A^2> - <A>^2) for Hermitian A; tiny negative variance in
/// [-tol, 0] is clamped to zero.
double uncertainty(const Operator& a, const DensityOperator& rho,
                   double tol = 1e-10);

/// AB - BA.
Operator commutator(const Operator& a, const Operator& b);

/// Trace over the second tensor factor: dim(rho) = d1*d2, pointer
/// systems are always the second factor.
DensityOperator partial_trace_second(const DensityOperator& rho,
                                     Eigen::Index d1, Eigen::Index d2);

/// Von Neumann entropy in bits, -sum p log2 p over eigenvalues.
double entropy_bits(const DensityOperator& rho, double tol = 1e-10);

/// Eigen-decomposition of a Hermitian operator with a deterministic
/// ordering: descending eigenvalue, each eigenvector's first component
/// of modulus > tol made real positive.
struct EigenSystem {
    Eigen::VectorXd values;  // descending
    Mat vectors;             // columns, phase-fixed
};
EigenSystem hermitian_eigensystem(const Operator& a, double tol = 1e-12);

/// Truncated harmonic-oscillator position/momentum pair built from
/// ladder operators: Q = sqrt(hbar/2)(a + a+), P = i sqrt(hbar/2)(a+ - a).
/// Faithful to [Q,P] = i hbar on the leading (n-1)-block.
std::pair<Operator, Operator> oscillator_qp(Eigen::Index n, double hbar = 1.0);

}  // namespace qsf

#endif
