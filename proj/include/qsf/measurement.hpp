#ifndef QSF_MEASUREMENT_HPP
#define QSF_MEASUREMENT_HPP

#include "qsf/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qsf {

// Instantaneous measurement machinery: the atom/pointer interaction, its
// decoherence into a block-diagonal mixture, Bayes conditioning, the
// projection postulate and generalized instruments. Pointer systems are
// always the second tensor factor; the composite index is sigma*2 + tau.

/// 4x4 permutation unitary |sigma,tau> -> |sigma, tau XOR sigma>.
Operator cat_interaction_unitary();

/// Applies the interaction to psi (x) |0>; the result has amplitude
/// psi(sigma) on |sigma,sigma> and zero elsewhere.
StateVector cat_interact(const StateVector& psi, double tol = 1e-8);

struct DecoherenceResult {
    DensityOperator joint;       // block-diagonal, dim 4
    DensityOperator atom;        // partial trace over pointer, dim 2
    double probabilities[2];     // Pr(tau) = |psi(tau)|^2
};

/// Projects the entangled vector onto the block-diagonal mixture
/// sum_tau Pr(tau) P_tau (x) P_tau and the reduced atom state.
DecoherenceResult decohere(const StateVector& chi, double tol = 1e-8);

/// Normalizes the selected member of a subnormalized family.
DensityOperator bayes_condition(const std::vector<Operator>& family,
                                std::size_t outcome, double tol = 1e-12);

/// rho -> E rho E + F rho F with E = I - F.
DensityOperator project_postulate(const DensityOperator& rho,
                                  const Operator& f, double tol = 1e-8);

enum class BranchOutcome { E_false, F_true };

/// Normalized projected state for the selected branch.
StateVector luders_update(const StateVector& psi, const Operator& f,
                          BranchOutcome outcome, double tol = 1e-8);

/// Family V(y) with measure weights; sum V(y)+ V(y) mu(y) = I.
struct Instrument {
    std::vector<std::string> labels;
    std::vector<Operator> kraus;
    std::vector<double> weights;  // mu(y)

    /// max-norm defect of the normalization sum.
    double completeness_defect() const;
    void validate(double tol = 1e-8) const;

    static Instrument projective(const std::vector<Operator>& projectors);
};

struct MeasurementOutcome {
    std::size_t index;
    std::string label;
    double probability;   // f(y) mu(y)
    StateVector posterior;
};

/// Samples an outcome with weight ||V(y) psi||^2 mu(y) given a uniform
/// draw in [0,1); the caller owns the randomness.
MeasurementOutcome instrument_apply(const Instrument& inst,
                                    const StateVector& psi,
                                    double uniform_draw, double tol = 1e-8);

/// The unsampled mixture sum f(y) mu(y) P_posterior.
DensityOperator instrument_mixture(const Instrument& inst,
                                   const StateVector& psi);

struct NondemolitionReport {
    bool commutes_on_initial;  // [F (x) I, G] chi0 = 0 for all product chi0
    Operator reduced_x;        // X0 = sum_tau E(tau) F E(tau)
    Operator reduced_y;        // Y0 = sum_tau g(tau) E(tau)
    bool reduced_commute;      // [X0, Y0] = 0
};

/// Builds G = multiplication by g(sigma + tau mod 2) on the dim-4 space
/// and checks commutation against F (x) I on all initial vectors
/// psi (x) |0>, plus the reduced-operator commutation.
NondemolitionReport nondemolition_check(const Operator& f,
                                        const std::function<double(int)>& g,
                                        double tol = 1e-10);

}  // namespace qsf

#endif
