#include "qsf/free_particle.hpp"

#include <cmath>

namespace qsf {

ObservedParticle::ObservedParticle(double m, double l, double h, double q,
                                   double v)
    : mass(m), lambda(l), hbar(h), q0(q), v0(v) {
    if (mass <= 0.0 || hbar <= 0.0)
        throw PreconditionError("ObservedParticle: mass and hbar must be positive");
    if (lambda < 0.0)
        throw PreconditionError("ObservedParticle: lambda must be nonnegative");
}

double ObservedParticle::kappa() const {
    return std::sqrt(lambda * hbar / (2.0 * mass));
}

ObservedPath ObservedPath::analytic(std::function<double(double)> y,
                                    std::function<double(double)> g) {
    ObservedPath p;
    p.y = std::move(y);
    p.g = std::move(g);
    return p;
}

ObservedPath ObservedPath::linear(double u, double q) {
    return analytic([u, q](double t) { return u * t - q; },
                    [](double) { return 0.0; });
}

ObservedPath ObservedPath::sampled(const std::vector<double>& values,
                                   double dt) {
    if (values.size() < 3 || dt <= 0.0)
        throw PreconditionError("ObservedPath::sampled: need >= 3 uniform samples");
    auto lerp = [values, dt](double t) {
        double s = t / dt;
        std::size_t i = std::size_t(std::max(0.0, std::floor(s)));
        if (i >= values.size() - 1) return values.back();
        double f = s - double(i);
        return (1.0 - f) * values[i] + f * values[i + 1];
    };
    // Centered second differences, one-sided at the ends.
    std::vector<double> g2(values.size());
    std::size_t n = values.size();
    for (std::size_t i = 1; i + 1 < n; ++i)
        g2[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (dt * dt);
    g2[0] = g2[1];
    g2[n - 1] = g2[n - 2];
    auto g_interp = [g2, dt](double t) {
        double s = t / dt;
        std::size_t i = std::size_t(std::max(0.0, std::floor(s)));
        if (i >= g2.size() - 1) return g2.back();
        double f = s - double(i);
        return (1.0 - f) * g2[i] + f * g2[i + 1];
    };
    return analytic(lerp, g_interp);
}

DeviationSolution deviation_solve(const ObservedParticle& p,
                                  const ObservedPath& path, double z0,
                                  double z0_dot, double t_end, double dt) {
    if (dt <= 0.0)
        throw PreconditionError("deviation_solve: dt must be positive");
    double kappa = p.kappa();
    if (dt * kappa > 0.1)
        throw PreconditionError("deviation_solve: dt*kappa > 0.1 accuracy guard");

    auto acc = [&](double z, double zd, double t) {
        return -2.0 * kappa * zd - 2.0 * kappa * kappa * z - path.g(t);
    };
    std::size_t n_steps = std::size_t(std::llround(t_end / dt));
    DeviationSolution sol;
    sol.times.reserve(n_steps + 1);
    sol.z.reserve(n_steps + 1);
    sol.z_dot.reserve(n_steps + 1);
    double z = z0, zd = z0_dot;
    sol.times.push_back(0.0);
    sol.z.push_back(z);
    sol.z_dot.push_back(zd);
    for (std::size_t i = 0; i < n_steps; ++i) {
        double t = i * dt;
        double k1z = zd, k1v = acc(z, zd, t);
        double k2z = zd + 0.5 * dt * k1v,
               k2v = acc(z + 0.5 * dt * k1z, zd + 0.5 * dt * k1v, t + 0.5 * dt);
        double k3z = zd + 0.5 * dt * k2v,
               k3v = acc(z + 0.5 * dt * k2z, zd + 0.5 * dt * k2v, t + 0.5 * dt);
        double k4z = zd + dt * k3v,
               k4v = acc(z + dt * k3z, zd + dt * k3v, t + dt);
        z += (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        zd += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        sol.times.push_back((i + 1) * dt);
        sol.z.push_back(z);
        sol.z_dot.push_back(zd);
    }
    return sol;
}

double appendix_q(const ObservedParticle& p, double u, double q, double t) {
    double kappa = p.kappa();
    if (kappa <= 0.0)
        throw PreconditionError(
            "appendix_q: requires kappa > 0 (use the lambda = 0 branch)");
    double c = q + (p.v0 - u) / kappa;
    return u * t +
           std::exp(-kappa * t) *
               (q * std::cos(kappa * t) + c * std::sin(kappa * t)) -
           q;
}

double ballistic_q(const ObservedParticle& p, double t) {
    return p.v0 * t;
}

ConsistencyReport consistency_check(const ObservedParticle& p, double u,
                                    double q, double t_end, double dt) {
    ObservedPath path = ObservedPath::linear(u, q);
    // q(0) = 0 in the framework where q0 = 0; z(0) = q0 - y(0) = q.
    DeviationSolution sol =
        deviation_solve(p, path, p.q0 - path.y(0.0), p.v0 - u, t_end, dt);
    ConsistencyReport rep;
    rep.max_abs_error = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        double t = sol.times[i];
        double numeric = sol.z[i] + path.y(t);
        double closed = appendix_q(p, u, q, t);
        rep.times.push_back(t);
        rep.q_numeric.push_back(numeric);
        rep.q_closed_form.push_back(closed);
        rep.max_abs_error = std::max(rep.max_abs_error,
                                     std::abs(numeric - closed));
        scale = std::max(scale, std::abs(closed));
    }
    rep.max_rel_error = scale > 0.0 ? rep.max_abs_error / scale : rep.max_abs_error;
    return rep;
}

}  // namespace qsf
