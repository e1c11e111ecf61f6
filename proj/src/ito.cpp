#include "qsf/ito.hpp"

#include <sstream>
#include <vector>

namespace qsf {

namespace {

Mat minkowski_flip(int d) {
    // Permutation swapping the "-" and "+" slots.
    Mat j = Mat::Identity(d + 2, d + 2);
    j(0, 0) = 0;
    j(d + 1, d + 1) = 0;
    j(0, d + 1) = 1;
    j(d + 1, 0) = 1;
    return j;
}

std::string format_coeff(Complex c) {
    std::ostringstream os;
    if (c.imag() == 0.0) {
        os << c.real();
    } else if (c.real() == 0.0) {
        os << c.imag() << "i";
    } else {
        os << "(" << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i)";
    }
    return os.str();
}

std::string label_name(int mu, int nu, int d) {
    if (d == 1) {
        if (mu == 0 && nu == 2) return "dt";
        if (mu == 0 && nu == 1) return "e_-";
        if (mu == 1 && nu == 2) return "e^+";
        if (mu == 1 && nu == 1) return "e";
    }
    std::ostringstream os;
    os << "L(";
    if (mu == 0) os << "-";
    else os << mu;
    os << ",";
    if (nu == d + 1) os << "+";
    else os << nu;
    os << ")";
    return os.str();
}

}  // namespace

ItoElement ItoElement::star() const {
    Mat j = minkowski_flip(noise_dim);
    return ItoElement(noise_dim, j * m.adjoint() * j);
}

ItoElement operator+(const ItoElement& a, const ItoElement& b) {
    if (a.noise_dim != b.noise_dim)
        throw DimensionMismatch("ItoElement addition: noise_dim mismatch");
    return ItoElement(a.noise_dim, a.m + b.m);
}

ItoElement operator-(const ItoElement& a, const ItoElement& b) {
    if (a.noise_dim != b.noise_dim)
        throw DimensionMismatch("ItoElement subtraction: noise_dim mismatch");
    return ItoElement(a.noise_dim, a.m - b.m);
}

ItoElement operator*(Complex c, const ItoElement& a) {
    return ItoElement(a.noise_dim, c * a.m);
}

ItoElement multiply(const ItoElement& a, const ItoElement& b) {
    if (a.noise_dim != b.noise_dim)
        throw DimensionMismatch("ItoElement product: noise_dim mismatch");
    return ItoElement(a.noise_dim, a.m * b.m);
}

Complex& ItoExpansion::at(int mu, int nu) {
    if (mu < 0 || mu > noise_dim || nu < 1 || nu > noise_dim + 1)
        throw PreconditionError("ItoExpansion::at: label out of range");
    return coeff(mu, nu - 1);
}

Complex ItoExpansion::at(int mu, int nu) const {
    if (mu < 0 || mu > noise_dim || nu < 1 || nu > noise_dim + 1)
        throw PreconditionError("ItoExpansion::at: label out of range");
    return coeff(mu, nu - 1);
}

ItoElement ItoExpansion::to_element() const {
    int d = noise_dim;
    Mat m = Mat::Zero(d + 2, d + 2);
    for (int mu = 0; mu <= d; ++mu)
        for (int nu = 1; nu <= d + 1; ++nu)
            m(mu, nu) = coeff(mu, nu - 1);
    return ItoElement(d, m);
}

ItoExpansion ItoExpansion::from_element(const ItoElement& e) {
    int d = e.noise_dim;
    // Entries outside the upper-right block are forbidden by causality.
    if (e.m.row(d + 1).cwiseAbs().maxCoeff() != 0.0 ||
        e.m.col(0).cwiseAbs().maxCoeff() != 0.0)
        throw PreconditionError("ItoExpansion: element has anti-causal entries");
    ItoExpansion x(d);
    for (int mu = 0; mu <= d; ++mu)
        for (int nu = 1; nu <= d + 1; ++nu)
            x.coeff(mu, nu - 1) = e.m(mu, nu);
    return x;
}

std::string ItoExpansion::to_string() const {
    std::ostringstream os;
    bool first = true;
    // Stable term order: dt first, then e_-, e^+, e for d = 1.
    struct Term { int mu, nu; };
    std::vector<Term> order;
    order.push_back({0, noise_dim + 1});  // dt
    for (int mu = 0; mu <= noise_dim; ++mu)
        for (int nu = 1; nu <= noise_dim + 1; ++nu)
            if (!(mu == 0 && nu == noise_dim + 1)) order.push_back({mu, nu});
    for (const auto& t : order) {
        Complex c = at(t.mu, t.nu);
        if (c == Complex(0.0, 0.0)) continue;
        if (!first) os << " + ";
        first = false;
        if (c == Complex(1.0, 0.0))
            os << label_name(t.mu, t.nu, noise_dim);
        else
            os << format_coeff(c) << "*" << label_name(t.mu, t.nu, noise_dim);
    }
    if (first) os << "0";
    return os.str();
}

ItoElement basis(BasisName name) {
    Mat m = Mat::Zero(3, 3);
    switch (name) {
        case BasisName::dt:
            m(0, 2) = 1;
            break;
        case BasisName::dw:
            m(0, 1) = 1;
            m(1, 2) = 1;
            break;
        case BasisName::dm:
            m(0, 1) = 1;
            m(1, 1) = 1;
            m(1, 2) = 1;
            break;
        case BasisName::e_minus:
            m(0, 1) = 1;
            break;
        case BasisName::e_plus:
            m(1, 2) = 1;
            break;
        case BasisName::e:
            m(1, 1) = 1;
            break;
    }
    return ItoElement(1, m);
}

ItoElement basis(const std::string& name) {
    if (name == "dt") return basis(BasisName::dt);
    if (name == "dw") return basis(BasisName::dw);
    if (name == "dm") return basis(BasisName::dm);
    if (name == "e_minus" || name == "e_-") return basis(BasisName::e_minus);
    if (name == "e_plus" || name == "e^+") return basis(BasisName::e_plus);
    if (name == "e") return basis(BasisName::e);
    throw PreconditionError("unknown Ito basis name: " + name);
}

ItoExpansion hp_product(int iota, int mu, int nu, int kappa, int d) {
    // Upper indices: 0 = "+", 1..d circles. Lower indices: 0 = "-", 1..d.
    if (d < 1 || iota < 0 || iota > d || nu < 0 || nu > d || mu < 0 ||
        mu > d || kappa < 0 || kappa > d)
        throw PreconditionError("hp_product: index out of range");
    ItoExpansion x(d);
    bool match = (iota >= 1 && iota == kappa);
    if (match) x.at(mu, nu == 0 ? d + 1 : nu) = 1.0;
    return x;
}

ItoElement standard_process(double eps) {
    if (eps < 0.0)
        throw PreconditionError("standard_process: eps must be nonnegative");
    return basis(BasisName::e_plus) + basis(BasisName::e_minus) +
           Complex(eps) * basis(BasisName::e);
}

HeisenbergPairTable heisenberg_pair_check(double hbar) {
    ItoElement dw = basis(BasisName::e_minus) + basis(BasisName::e_plus);
    ItoElement df = Complex(0, hbar) *
                    (basis(BasisName::e_minus) - basis(BasisName::e_plus));
    HeisenbergPairTable t{ItoExpansion(1), ItoExpansion(1), ItoExpansion(1),
                          ItoExpansion(1)};
    t.fw = ItoExpansion::from_element(multiply(df, dw));
    t.wf = ItoExpansion::from_element(multiply(dw, df));
    t.ww = ItoExpansion::from_element(multiply(dw, dw));
    t.ff = ItoExpansion::from_element(multiply(df, df));
    return t;
}

UncertaintyProductReport uncertainty_product(double sigma, double tau,
                                             double hbar) {
    if (sigma <= 0.0 || tau <= 0.0 || hbar <= 0.0)
        throw PreconditionError("uncertainty_product: inputs must be positive");
    double bound = hbar / 2.0;
    double slack = sigma * tau - bound;
    // Saturation counts: allow rounding noise at the boundary.
    return {slack >= -1e-12 * bound, bound, slack};
}

}  // namespace qsf
