#ifndef QSF_LATTICE_HPP
#define QSF_LATTICE_HPP

#include "qsf/types.hpp"

namespace qsf {

// Quantum-logic lattice of orthoprojectors. Meet/join are computed by
// singular-value thresholding at a fixed rank tolerance, which keeps the
// results projectors to working precision.

inline constexpr double kRankTol = 1e-8;

/// Orthoprojector onto range(E) ∩ range(F).
Operator projector_meet(const Operator& e, const Operator& f,
                        double tol = 1e-8);

/// Orthoprojector onto range(E) + range(F).
Operator projector_join(const Operator& e, const Operator& f,
                        double tol = 1e-8);

/// Lattice ordering E <= F via the relation EF = E.
bool projector_leq(const Operator& e, const Operator& f, double tol = 1e-8);

}  // namespace qsf

#endif
