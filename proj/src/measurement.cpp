#include "qsf/measurement.hpp"

#include <cmath>

namespace qsf {

namespace {

StateVector basis_state(Eigen::Index dim, Eigen::Index k) {
    Vec v = Vec::Zero(dim);
    v(k) = 1.0;
    return StateVector(v);
}

}  // namespace

Operator cat_interaction_unitary() {
    Mat u = Mat::Zero(4, 4);
    for (int sigma = 0; sigma < 2; ++sigma)
        for (int tau = 0; tau < 2; ++tau)
            u(sigma * 2 + (tau ^ sigma), sigma * 2 + tau) = 1.0;
    return Operator(u);
}

StateVector cat_interact(const StateVector& psi, double tol) {
    if (psi.dim() != 2)
        throw DimensionMismatch("cat_interact: atom state must be dim 2");
    if (std::abs(psi.norm2() - 1.0) > tol)
        throw PreconditionError("cat_interact: atom state not normalized");
    Vec chi0 = Vec::Zero(4);
    chi0(0) = psi.v(0);  // |0> (x) |0>
    chi0(2) = psi.v(1);  // |1> (x) |0>
    return StateVector(cat_interaction_unitary().m * chi0);
}

DecoherenceResult decohere(const StateVector& chi, double tol) {
    if (chi.dim() != 4)
        throw DimensionMismatch("decohere: expected dim-4 composite state");
    // Only the diagonal blocks |sigma,sigma> may carry amplitude.
    if (std::abs(chi.v(1)) > tol || std::abs(chi.v(2)) > tol)
        throw PreconditionError("decohere: off-block amplitude present");
    double pr0 = std::norm(chi.v(0));
    double pr1 = std::norm(chi.v(3));
    Mat joint = Mat::Zero(4, 4);
    joint(0, 0) = pr0;  // P_0 (x) P_0
    joint(3, 3) = pr1;  // P_1 (x) P_1
    Mat atom = Mat::Zero(2, 2);
    atom(0, 0) = pr0;
    atom(1, 1) = pr1;
    DecoherenceResult r{DensityOperator(Operator(joint)),
                        DensityOperator(Operator(atom)),
                        {pr0, pr1}};
    return r;
}

DensityOperator bayes_condition(const std::vector<Operator>& family,
                                std::size_t outcome, double tol) {
    if (outcome >= family.size())
        throw PreconditionError("bayes_condition: outcome out of range");
    const Operator& block = family[outcome];
    double pr = block.m.trace().real();
    if (pr <= tol)
        throw PreconditionError("bayes_condition: zero-probability outcome");
    return DensityOperator(Operator(block.m / pr));
}

DensityOperator project_postulate(const DensityOperator& rho,
                                  const Operator& f, double tol) {
    if (!f.is_projector(tol))
        throw PreconditionError("project_postulate: F is not a projector");
    if (f.dim() != rho.dim())
        throw DimensionMismatch("project_postulate: dimension mismatch");
    Mat e = Mat::Identity(f.dim(), f.dim()) - f.m;
    return DensityOperator(
        Operator(e * rho.op.m * e + f.m * rho.op.m * f.m));
}

StateVector luders_update(const StateVector& psi, const Operator& f,
                          BranchOutcome outcome, double tol) {
    if (!f.is_projector(tol))
        throw PreconditionError("luders_update: F is not a projector");
    if (f.dim() != psi.dim())
        throw DimensionMismatch("luders_update: dimension mismatch");
    Mat proj = outcome == BranchOutcome::F_true
                   ? f.m
                   : Mat(Mat::Identity(f.dim(), f.dim()) - f.m);
    Vec branch = proj * psi.v;
    if (branch.norm() <= tol)
        throw PreconditionError("luders_update: zero-norm branch");
    return StateVector(branch / branch.norm());
}

double Instrument::completeness_defect() const {
    if (kraus.empty()) return 1.0;
    Eigen::Index n = kraus.front().dim();
    Mat sum = Mat::Zero(n, n);
    for (std::size_t i = 0; i < kraus.size(); ++i)
        sum += weights[i] * (kraus[i].m.adjoint() * kraus[i].m);
    return (sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

void Instrument::validate(double tol) const {
    if (kraus.size() != weights.size() || kraus.size() != labels.size())
        throw PreconditionError("Instrument: inconsistent field lengths");
    if (completeness_defect() > tol)
        throw PreconditionError("Instrument: normalization sum differs from I");
}

Instrument Instrument::projective(const std::vector<Operator>& projectors) {
    Instrument inst;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        inst.labels.push_back(std::to_string(i));
        inst.kraus.push_back(projectors[i]);
        inst.weights.push_back(1.0);
    }
    return inst;
}

MeasurementOutcome instrument_apply(const Instrument& inst,
                                    const StateVector& psi,
                                    double uniform_draw, double tol) {
    inst.validate(tol);
    if (std::abs(psi.norm2() - 1.0) > tol)
        throw PreconditionError("instrument_apply: state not normalized");
    std::vector<double> w(inst.kraus.size());
    double total = 0.0;
    for (std::size_t i = 0; i < inst.kraus.size(); ++i) {
        Vec branch = inst.kraus[i].m * psi.v;
        w[i] = branch.squaredNorm() * inst.weights[i];
        total += w[i];
    }
    if (total <= tol)
        throw PreconditionError("instrument_apply: all outcome weights zero");
    double target = uniform_draw * total;
    double acc = 0.0;
    std::size_t pick = w.size() - 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (target < acc) {
            pick = i;
            break;
        }
    }
    Vec branch = inst.kraus[pick].m * psi.v;
    return MeasurementOutcome{pick, inst.labels[pick], w[pick] / total,
                              StateVector(branch / branch.norm())};
}

DensityOperator instrument_mixture(const Instrument& inst,
                                   const StateVector& psi) {
    Eigen::Index n = psi.dim();
    Mat rho = Mat::Zero(n, n);
    for (std::size_t i = 0; i < inst.kraus.size(); ++i) {
        Vec branch = inst.kraus[i].m * psi.v;
        rho += inst.weights[i] * (branch * branch.adjoint());
    }
    return DensityOperator(Operator(rho));
}

NondemolitionReport nondemolition_check(const Operator& f,
                                        const std::function<double(int)>& g,
                                        double tol) {
    if (f.dim() != 2)
        throw DimensionMismatch("nondemolition_check: F must be dim 2");
    // G multiplies by g(sigma + tau mod 2) on the composite basis.
    Mat big_g = Mat::Zero(4, 4);
    for (int sigma = 0; sigma < 2; ++sigma)
        for (int tau = 0; tau < 2; ++tau)
            big_g(sigma * 2 + tau, sigma * 2 + tau) = g(sigma ^ tau);
    Mat big_f = Mat::Zero(4, 4);
    for (int tau = 0; tau < 2; ++tau)
        for (int s = 0; s < 2; ++s)
            for (int sp = 0; sp < 2; ++sp)
                big_f(s * 2 + tau, sp * 2 + tau) = f.m(s, sp);
    Mat comm = big_f * big_g - big_g * big_f;

    // Product initial vectors psi (x) |0> span the columns tau = 0.
    bool commutes = true;
    for (int s = 0; s < 2; ++s) {
        Vec chi0 = Vec::Zero(4);
        chi0(s * 2 + 0) = 1.0;
        if ((comm * chi0).cwiseAbs().maxCoeff() > tol) commutes = false;
    }
    // Also check the superposition column to catch cross terms.
    Vec chi_plus = Vec::Zero(4);
    chi_plus(0) = chi_plus(2) = 1.0 / std::sqrt(2.0);
    if ((comm * chi_plus).cwiseAbs().maxCoeff() > tol) commutes = false;

    // Reduced operators on the atom space.
    Mat x0 = Mat::Zero(2, 2);
    Mat y0 = Mat::Zero(2, 2);
    for (int tau = 0; tau < 2; ++tau) {
        Mat e_tau = Mat::Zero(2, 2);
        e_tau(tau, tau) = 1.0;
        x0 += e_tau * f.m * e_tau;
        y0 += g(tau) * e_tau;
    }
    Mat rc = x0 * y0 - y0 * x0;
    return NondemolitionReport{commutes, Operator(x0), Operator(y0),
                               rc.cwiseAbs().maxCoeff() <= tol};
}

}  // namespace qsf
