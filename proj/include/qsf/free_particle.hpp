#ifndef QSF_FREE_PARTICLE_HPP
#define QSF_FREE_PARTICLE_HPP

#include "qsf/types.hpp"

#include <functional>
#include <vector>

namespace qsf {

// Continuously observed free particle: the posterior-mean deviation ODE
// z'' + 2 kappa z' + 2 kappa^2 z = -g(t) and its closed-form solution for
// a linear registered record.

struct ObservedParticle {
    double mass = 1.0;
    double lambda = 0.0;  // observation accuracy, 1/(length^2 time)
    double hbar = 1.0;
    double q0 = 0.0;      // initial posterior mean position
    double v0 = 0.0;      // initial posterior mean velocity

    ObservedParticle() = default;
    ObservedParticle(double m, double l, double h, double q, double v);

    /// Collapse rate (lambda hbar / 2m)^(1/2); recomputed, never stored.
    double kappa() const;
};

/// Observed trajectory, either analytic or uniformly sampled. The
/// effective gravitation g(t) = y''(t) comes from the supplied callable
/// or from centered second differences (one-sided at the ends).
struct ObservedPath {
    std::function<double(double)> y;
    std::function<double(double)> g;

    static ObservedPath analytic(std::function<double(double)> y,
                                 std::function<double(double)> g);
    static ObservedPath linear(double u, double q);  // y = u t - q, g = 0
    static ObservedPath sampled(const std::vector<double>& values, double dt);
};

struct DeviationSolution {
    std::vector<double> times;
    std::vector<double> z;
    std::vector<double> z_dot;
};

/// RK4 integration of z'' + 2 kappa z' + 2 kappa^2 z = -g(t).
DeviationSolution deviation_solve(const ObservedParticle& p,
                                  const ObservedPath& path, double z0,
                                  double z0_dot, double t_end, double dt);

/// Closed-form posterior mean for the linear record y(t) = u t - q:
/// q(t) = u t + e^(-kappa t)(q cos kappa t
///        + (q + (v0 - u)/kappa) sin kappa t) - q.
/// Requires kappa > 0; the lambda = 0 branch is q0(t) = v0 t.
double appendix_q(const ObservedParticle& p, double u, double q, double t);

/// lambda = 0 branch: unobserved ballistic mean.
double ballistic_q(const ObservedParticle& p, double t);

struct ConsistencyReport {
    double max_abs_error;
    double max_rel_error;  // relative to the trajectory scale max |q_closed|
    std::vector<double> times;
    std::vector<double> q_numeric;
    std::vector<double> q_closed_form;
};

/// Integrates the deviation ODE for the linear record and compares the
/// reconstruction q(t) = z(t) + y(t) against the closed form.
ConsistencyReport consistency_check(const ObservedParticle& p, double u,
                                    double q, double t_end, double dt);

}  // namespace qsf

#endif
