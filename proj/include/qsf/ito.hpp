#ifndef QSF_ITO_HPP
#define QSF_ITO_HPP

#include "qsf/types.hpp"

#include <string>

namespace qsf {

// The generalized Ito *-algebra of stochastic differentials, realized as
// triangular matrices on the Minkowski-ordered basis (-, 1..d, +).
// All d = 1 identities hold exactly in integer arithmetic.

/// Element of the (d+2)x(d+2) matrix representation.
struct ItoElement {
    int noise_dim = 1;
    Mat m;  // (d+2)x(d+2)

    ItoElement() : m(Mat::Zero(3, 3)) {}
    ItoElement(int d, Mat mat) : noise_dim(d), m(std::move(mat)) {
        if (m.rows() != d + 2 || m.cols() != d + 2)
            throw DimensionMismatch("ItoElement: matrix must be (d+2)x(d+2)");
    }

    /// Involution a -> a* (adjoint w.r.t. the Minkowski inner product):
    /// conjugate-transpose followed by the index flip -(-,1..d,+) = (+,1..d,-).
    ItoElement star() const;

    bool operator==(const ItoElement& o) const {
        return noise_dim == o.noise_dim && m == o.m;
    }
};

ItoElement operator+(const ItoElement& a, const ItoElement& b);
ItoElement operator-(const ItoElement& a, const ItoElement& b);
ItoElement operator*(Complex c, const ItoElement& a);

/// Matrix product; realizes the Ito multiplication rules.
ItoElement multiply(const ItoElement& a, const ItoElement& b);

/// Coefficients over the labeled basis Lambda_mu^nu with
/// mu in {-,1..d}, nu in {1..d,+}; dt = Lambda_-^+.
/// Stored densely: rows indexed by mu (0 = "-", 1..d), columns by nu
/// (0..d-1 = circles 1..d, d = "+").
struct ItoExpansion {
    int noise_dim = 1;
    Mat coeff;  // (d+1)x(d+1)

    explicit ItoExpansion(int d = 1)
        : noise_dim(d), coeff(Mat::Zero(d + 1, d + 1)) {}

    Complex& at(int mu, int nu);          // mu: 0 = "-", 1..d; nu: 1..d, d+1 = "+"
    Complex at(int mu, int nu) const;

    ItoElement to_element() const;
    static ItoExpansion from_element(const ItoElement& e);

    /// Human-readable rendering, e.g. "dt + 0.5*e" for d = 1.
    std::string to_string() const;
};

enum class BasisName { dt, dw, dm, e_minus, e_plus, e };

/// The exact integer 3x3 matrices for the d = 1 algebra.
ItoElement basis(BasisName name);
ItoElement basis(const std::string& name);

/// HP table product dLambda_mu^iota dLambda_kappa^nu = delta_kappa^iota
/// Lambda_mu^nu. Index convention: 0 means "-" for lower indices and "+"
/// for upper ones; 1..d are the circle indices.
ItoExpansion hp_product(int iota, int mu, int nu, int kappa, int d);

/// dy = dLambda^+ + dLambda_- + eps dLambda; satisfies
/// (dy)^2 - dt = eps dy exactly.
ItoElement standard_process(double eps);

/// Commutator table for the error/perturbation pair
/// w = Lambda_- + Lambda^+, f = i hbar (Lambda_- - Lambda^+).
struct HeisenbergPairTable {
    ItoExpansion fw;  // df dw = i hbar dt
    ItoExpansion wf;  // dw df = -i hbar dt
    ItoExpansion ww;  // dw dw = dt
    ItoExpansion ff;  // df df = hbar^2 dt
};
HeisenbergPairTable heisenberg_pair_check(double hbar);

/// Reports whether sigma*tau >= hbar/2 and the slack.
struct UncertaintyProductReport {
    bool satisfies;
    double bound;  // hbar/2
    double slack;  // sigma*tau - hbar/2
};
UncertaintyProductReport uncertainty_product(double sigma, double tau,
                                             double hbar);

}  // namespace qsf

#endif
