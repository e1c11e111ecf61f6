#include <doctest.h>

#include "qsf/ito.hpp"
#include "qsf/rng.hpp"

using namespace qsf;

namespace {

Mat m3(std::initializer_list<double> vals) {
    Mat m(3, 3);
    int i = 0;
    for (double v : vals) {
        m(i / 3, i % 3) = v;
        ++i;
    }
    return m;
}

bool exact_eq(const ItoElement& a, const Mat& m) {
    return (a.m - m).cwiseAbs().maxCoeff() == 0.0;
}

ItoElement random_integer_element(Rng& rng) {
    Mat m = Mat::Zero(3, 3);
    for (int mu = 0; mu <= 1; ++mu)
        for (int nu = 1; nu <= 2; ++nu)
            m(mu, nu) = Complex(double(int(rng.uniform() * 7) - 3),
                                double(int(rng.uniform() * 7) - 3));
    return ItoElement(1, m);
}

}  // namespace

TEST_CASE("basis matrices match the displayed tables exactly") {
    CHECK(exact_eq(basis(BasisName::dt), m3({0, 0, 1, 0, 0, 0, 0, 0, 0})));
    CHECK(exact_eq(basis(BasisName::dw), m3({0, 1, 0, 0, 0, 1, 0, 0, 0})));
    CHECK(exact_eq(basis(BasisName::dm), m3({0, 1, 0, 0, 1, 1, 0, 0, 0})));
    CHECK(exact_eq(basis(BasisName::e_minus), m3({0, 1, 0, 0, 0, 0, 0, 0, 0})));
    CHECK(exact_eq(basis(BasisName::e_plus), m3({0, 0, 0, 0, 0, 1, 0, 0, 0})));
    CHECK(exact_eq(basis(BasisName::e), m3({0, 0, 0, 0, 1, 0, 0, 0, 0})));
    CHECK_THROWS_AS(basis("bogus"), PreconditionError);
}

TEST_CASE("basis combinations") {
    auto dt = basis(BasisName::dt);
    auto dw = basis(BasisName::dw);
    auto dm = basis(BasisName::dm);
    CHECK(multiply(dw, dm) - dt == basis(BasisName::e_minus));
    CHECK(multiply(dm, dw) - dt == basis(BasisName::e_plus));
    // The counting unit is the difference of the two noises.
    CHECK(dm - dw == basis(BasisName::e));
}

TEST_CASE("Ito multiplication rules") {
    auto dt = basis(BasisName::dt);
    auto dw = basis(BasisName::dw);
    auto dm = basis(BasisName::dm);
    CHECK(multiply(dw, dw) == dt);
    CHECK(multiply(dm, dm) == dm + dt);
    CHECK(multiply(dt, dt).m.cwiseAbs().maxCoeff() == 0.0);
    CHECK(multiply(multiply(dw, dw), dw).m.cwiseAbs().maxCoeff() == 0.0);

    // Displayed non-commutativity.
    CHECK(exact_eq(multiply(dw, dm), m3({0, 1, 1, 0, 0, 0, 0, 0, 0})));
    CHECK(exact_eq(multiply(dm, dw), m3({0, 0, 1, 0, 0, 1, 0, 0, 0})));
    CHECK_FALSE(multiply(dw, dm) == multiply(dm, dw));
}

TEST_CASE("Wiener and Poisson subalgebras commute internally") {
    auto dt = basis(BasisName::dt);
    auto dw = basis(BasisName::dw);
    auto dm = basis(BasisName::dm);
    CHECK(multiply(dt, dw) == multiply(dw, dt));
    CHECK(multiply(dt, dm) == multiply(dm, dt));
    CHECK(multiply(dw, dw) == multiply(dw, dw));
}

TEST_CASE("star closure and anti-multiplicativity") {
    auto names = {BasisName::dt, BasisName::dw, BasisName::dm,
                  BasisName::e_minus, BasisName::e_plus, BasisName::e};
    for (auto a : names) {
        for (auto b : names) {
            ItoElement lhs = multiply(basis(a), basis(b)).star();
            ItoElement rhs = multiply(basis(b).star(), basis(a).star());
            CHECK(lhs == rhs);
        }
    }
    CHECK(basis(BasisName::e_minus).star() == basis(BasisName::e_plus));
    CHECK(basis(BasisName::dt).star() == basis(BasisName::dt));
    CHECK(basis(BasisName::dw).star() == basis(BasisName::dw));
    CHECK(basis(BasisName::dm).star() == basis(BasisName::dm));
}

TEST_CASE("associativity on random integer elements") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        ItoElement a = random_integer_element(rng);
        ItoElement b = random_integer_element(rng);
        ItoElement c = random_integer_element(rng);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    }
}

TEST_CASE("expansion round-trip") {
    Rng rng(78);
    for (int trial = 0; trial < 50; ++trial) {
        ItoElement a = random_integer_element(rng);
        CHECK(ItoExpansion::from_element(a).to_element() == a);
    }
}

TEST_CASE("HP table") {
    int d = 1;
    // dLambda_- dLambda^+ = dt (iota = 1 circle matches kappa = 1).
    ItoExpansion r = hp_product(1, 0, 0, 1, d);
    CHECK(r.at(0, 2) == Complex(1.0, 0.0));
    // dLambda dLambda^+ = dLambda^+.
    r = hp_product(1, 1, 0, 1, d);
    CHECK(r.at(1, 2) == Complex(1.0, 0.0));
    // dLambda^+ dLambda_- = 0 (upper "+" never matches lower "-").
    r = hp_product(0, 1, 1, 0, d);
    CHECK(r.coeff.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(hp_product(2, 0, 0, 0, 1), PreconditionError);

    // The matrix realization reproduces the HP rule for every label pair.
    for (int mu = 0; mu <= d; ++mu)
        for (int iota = 0; iota <= d; ++iota)
            for (int kappa = 0; kappa <= d; ++kappa)
                for (int nu = 0; nu <= d; ++nu) {
                    ItoExpansion a(d), b(d);
                    a.at(mu, iota == 0 ? d + 1 : iota) = 1.0;
                    b.at(kappa, nu == 0 ? d + 1 : nu) = 1.0;
                    ItoElement prod = multiply(a.to_element(), b.to_element());
                    ItoExpansion expect = hp_product(iota, mu, nu, kappa, d);
                    CHECK(prod == expect.to_element());
                }
}

TEST_CASE("standard process") {
    auto dt = basis(BasisName::dt);
    SUBCASE("Wiener at eps = 0") {
        ItoElement dy = standard_process(0.0);
        CHECK(multiply(dy, dy) == dt);
    }
    SUBCASE("compensated Poisson at eps = 1") {
        CHECK(standard_process(1.0) == basis(BasisName::dm));
    }
    SUBCASE("intermediate eps") {
        double eps = 0.5;  // nu = 4
        ItoElement dy = standard_process(eps);
        CHECK(multiply(dy, dy) == dt + Complex(eps) * dy);
    }
    CHECK_THROWS_AS(standard_process(-0.1), PreconditionError);
}

TEST_CASE("error/perturbation commutator table") {
    double hbar = 1.0 / 137.0;
    HeisenbergPairTable t = heisenberg_pair_check(hbar);
    CHECK(t.fw.at(0, 2) == Complex(0.0, hbar));
    CHECK(t.wf.at(0, 2) == Complex(0.0, -hbar));
    CHECK(t.ww.at(0, 2) == Complex(1.0, 0.0));
    CHECK(t.ff.at(0, 2) == Complex(hbar * hbar, 0.0));
    // All tables are pure dt terms.
    for (const ItoExpansion* x : {&t.fw, &t.wf, &t.ww, &t.ff}) {
        CHECK(x->at(0, 1) == Complex(0.0, 0.0));
        CHECK(x->at(1, 1) == Complex(0.0, 0.0));
        CHECK(x->at(1, 2) == Complex(0.0, 0.0));
    }
}

TEST_CASE("uncertainty product report") {
    double hbar = 2.0, lambda = 3.0;
    double sigma = std::sqrt(1.0 / (2.0 * lambda));
    double tau = std::sqrt(lambda * hbar * hbar / 2.0);
    auto rep = uncertainty_product(sigma, tau, hbar);
    CHECK(rep.satisfies);
    CHECK(rep.slack == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.bound == doctest::Approx(hbar / 2.0));

    auto rep2 = uncertainty_product(1.0, 1.0, 1.0);
    CHECK(rep2.satisfies);
    CHECK(rep2.slack == doctest::Approx(0.5));

    CHECK_FALSE(uncertainty_product(0.1, 0.1, 1.0).satisfies);
    CHECK_THROWS_AS(uncertainty_product(-1.0, 1.0, 1.0), PreconditionError);
}

TEST_CASE("text rendering") {
    ItoExpansion x(1);
    x.at(0, 2) = 1.0;
    x.at(1, 1) = 0.5;
    CHECK(x.to_string() == "dt + 0.5*e");
    CHECK(ItoExpansion(1).to_string() == "0");
}
