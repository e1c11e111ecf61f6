#include "qsf/lattice.hpp"

namespace qsf {

namespace {

void require_projector(const Operator& p, const char* name, double tol) {
    if (!p.is_projector(tol))
        throw PreconditionError(std::string(name) + ": input is not a projector");
}

/// Orthoprojector onto the span of the columns of m with singular value
/// above the rank threshold.
Operator range_projector(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    Eigen::Index n = m.rows();
    Mat p = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > kRankTol) {
            Vec u = svd.matrixU().col(i);
            p += u * u.adjoint();
        }
    }
    return Operator(p);
}

}  // namespace

Operator projector_meet(const Operator& e, const Operator& f, double tol) {
    require_projector(e, "projector_meet", tol);
    require_projector(f, "projector_meet", tol);
    if (e.dim() != f.dim())
        throw DimensionMismatch("projector_meet: dimension mismatch");
    Eigen::Index n = e.dim();
    // range(E) ∩ range(F) = null([E⊥; F⊥]) with E⊥ = I - E.
    Mat stacked(2 * n, n);
    stacked.topRows(n) = Mat::Identity(n, n) - e.m;
    stacked.bottomRows(n) = Mat::Identity(n, n) - f.m;
    Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
    Mat p = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double sv = i < svd.singularValues().size() ? svd.singularValues()(i) : 0.0;
        if (sv <= kRankTol) {
            Vec v = svd.matrixV().col(i);
            p += v * v.adjoint();
        }
    }
    return Operator(p);
}

Operator projector_join(const Operator& e, const Operator& f, double tol) {
    require_projector(e, "projector_join", tol);
    require_projector(f, "projector_join", tol);
    if (e.dim() != f.dim())
        throw DimensionMismatch("projector_join: dimension mismatch");
    Eigen::Index n = e.dim();
    Mat side(n, 2 * n);
    side.leftCols(n) = e.m;
    side.rightCols(n) = f.m;
    return range_projector(side);
}

bool projector_leq(const Operator& e, const Operator& f, double tol) {
    if (e.dim() != f.dim())
        throw DimensionMismatch("projector_leq: dimension mismatch");
    return (e.m * f.m - e.m).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qsf
