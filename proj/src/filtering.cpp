#include "qsf/filtering.hpp"
#include "qsf/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qsf {

namespace {

bool is_snapshot_step(std::size_t i, std::size_t n_steps, int stride) {
    if (i == 0 || i == n_steps) return true;
    return stride > 0 && i % std::size_t(stride) == 0;
}

void check_stability(double dt, const Mat& k, bool force) {
    if (dt * k.norm() > 0.1 && !force)
        throw PreconditionError(
            "stability guard: dt*||K|| > 0.1 (pass force to override)");
}

struct NoiseStream {
    Rng rng;
    double sign;

    NoiseStream(const IntegratorConfig& cfg, std::uint64_t index)
        : rng(Rng::stream(cfg.seed,
                          cfg.antithetic ? index / 2 : index)),
          sign(cfg.antithetic && (index % 2 == 1) ? -1.0 : 1.0) {}

    double gaussian() { return sign * rng.gaussian(); }
    double uniform() { return rng.uniform(); }
};

}  // namespace

FilterSystem::FilterSystem(double hbar_, Operator h, Operator l, double tol)
    : hbar(hbar_), H(std::move(h)), L(std::move(l)) {
    if (hbar <= 0.0) throw PreconditionError("FilterSystem: hbar must be positive");
    if (H.dim() != L.dim())
        throw DimensionMismatch("FilterSystem: H and L dimensions differ");
    if (!H.is_hermitian(tol))
        throw PreconditionError("FilterSystem: H not Hermitian");
    // K + K+ = L+L holds by construction; reject inconsistent inputs anyway.
    Mat k = K().m;
    if ((k + k.adjoint() - L.m.adjoint() * L.m).cwiseAbs().maxCoeff() > tol)
        throw PreconditionError("FilterSystem: K + K+ != L+L");
}

Operator FilterSystem::K() const {
    return Operator(0.5 * L.m.adjoint() * L.m + (kI / hbar) * H.m);
}

CountingSystem::CountingSystem(double hbar_, Operator e, Operator c,
                               double nu_, double tol)
    : hbar(hbar_), E(std::move(e)), C(std::move(c)), nu(nu_) {
    if (nu <= 0.0) throw PreconditionError("CountingSystem: nu must be positive");
    if (!E.is_hermitian(tol))
        throw PreconditionError("CountingSystem: E not Hermitian");
    if (E.dim() != C.dim())
        throw DimensionMismatch("CountingSystem: E and C dimensions differ");
    induced();  // throws if the induced pair is inconsistent
}

FilterSystem CountingSystem::induced() const {
    double root_nu = std::sqrt(nu);
    Operator l(root_nu * (C.m - Mat::Identity(C.dim(), C.dim())));
    Operator h(E.m + kI * (nu / 2.0) * (C.m - C.m.adjoint()));
    return FilterSystem(hbar, h, l);
}

CountingSystem central_limit_bridge(const FilterSystem& sys, double nu) {
    double root_nu = std::sqrt(nu);
    Operator c(Mat::Identity(sys.dim(), sys.dim()) + sys.L.m / root_nu);
    Operator e(sys.H.m - kI * (root_nu / 2.0) * (sys.L.m - sys.L.m.adjoint()));
    return CountingSystem(sys.hbar, e, c, nu);
}

void IntegratorConfig::validate() const {
    if (dt <= 0.0) throw PreconditionError("IntegratorConfig: dt must be positive");
    if (t_end <= 0.0)
        throw PreconditionError("IntegratorConfig: t_end must be positive");
    if (dt > t_end)
        throw PreconditionError("IntegratorConfig: dt must not exceed t_end");
}

TrajectoryRecord simulate_linear_diffusive(const FilterSystem& sys,
                                           const StateVector& psi0,
                                           const IntegratorConfig& cfg,
                                           std::uint64_t trajectory_index) {
    cfg.validate();
    if (psi0.dim() != sys.dim())
        throw DimensionMismatch("simulate_linear_diffusive: state dimension");
    Mat k = sys.K().m;
    check_stability(cfg.dt, k, cfg.force);
    NoiseStream noise(cfg, trajectory_index);

    std::size_t n_steps = std::size_t(std::llround(cfg.t_end / cfg.dt));
    double sqrt_dt = std::sqrt(cfg.dt);
    Vec chi = psi0.v;
    TrajectoryRecord rec;
    auto snapshot = [&](std::size_t i) {
        rec.snapshot_times.push_back(i * cfg.dt);
        rec.snapshots.push_back(chi);
        rec.norm2.push_back(chi.squaredNorm());
    };
    snapshot(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        double dy = sqrt_dt * noise.gaussian();
        Vec drift = -(k * chi);
        if (cfg.scheme == Scheme::heun_drift) {
            Vec pred = chi + drift * cfg.dt;
            drift = 0.5 * (drift - k * pred);
        }
        chi = chi + drift * cfg.dt + (sys.L.m * chi) * dy;
        if (cfg.record_increments) rec.dy.push_back(dy);
        if (is_snapshot_step(i + 1, n_steps, cfg.snapshot_stride))
            snapshot(i + 1);
    }
    return rec;
}

TrajectoryRecord simulate_filter_diffusive(
    const FilterSystem& sys, const StateVector& psi0,
    const IntegratorConfig& cfg, std::uint64_t trajectory_index,
    const std::vector<double>* external_innovation) {
    cfg.validate();
    if (psi0.dim() != sys.dim())
        throw DimensionMismatch("simulate_filter_diffusive: state dimension");
    check_stability(cfg.dt, sys.K().m, cfg.force);
    NoiseStream noise(cfg, trajectory_index);

    std::size_t n_steps = std::size_t(std::llround(cfg.t_end / cfg.dt));
    if (external_innovation && external_innovation->size() < n_steps)
        throw PreconditionError("external innovation series too short");
    double sqrt_dt = std::sqrt(cfg.dt);
    Eigen::Index n = sys.dim();
    Mat id = Mat::Identity(n, n);
    Mat l_anti = sys.L.m - sys.L.m.adjoint();
    Vec psi = psi0.normalized().v;

    TrajectoryRecord rec;
    auto snapshot = [&](std::size_t i) {
        rec.snapshot_times.push_back(i * cfg.dt);
        rec.snapshots.push_back(psi);
    };
    snapshot(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        double ell = (psi.adjoint() * (sys.L.m * psi))(0).real();
        Mat l_tilde = sys.L.m - ell * id;
        Mat h_tilde = sys.H.m + (kI / 2.0) * l_anti * ell;
        Mat k_tilde =
            0.5 * l_tilde.adjoint() * l_tilde + (kI / sys.hbar) * h_tilde;
        double d_innov = external_innovation ? (*external_innovation)[i]
                                             : sqrt_dt * noise.gaussian();
        Vec drift = -(k_tilde * psi);
        if (cfg.scheme == Scheme::heun_drift) {
            Vec pred = psi + drift * cfg.dt;
            drift = 0.5 * (drift - k_tilde * pred);
        }
        psi = psi + drift * cfg.dt + (l_tilde * psi) * d_innov;
        if (cfg.renormalize_each_step) psi.normalize();
        if (cfg.record_increments) {
            rec.innovation.push_back(d_innov);
            rec.dy.push_back(d_innov + 2.0 * ell * cfg.dt);
        }
        if (is_snapshot_step(i + 1, n_steps, cfg.snapshot_stride))
            snapshot(i + 1);
    }
    return rec;
}

TrajectoryRecord simulate_filter_counting(const CountingSystem& sys,
                                          const StateVector& psi0,
                                          const IntegratorConfig& cfg,
                                          std::uint64_t trajectory_index) {
    cfg.validate();
    if (psi0.dim() != sys.dim())
        throw DimensionMismatch("simulate_filter_counting: state dimension");
    NoiseStream noise(cfg, trajectory_index);

    std::size_t n_steps = std::size_t(std::llround(cfg.t_end / cfg.dt));
    Mat cc = sys.C.m.adjoint() * sys.C.m;
    double root_nu = std::sqrt(sys.nu);
    Vec psi = psi0.normalized().v;

    TrajectoryRecord rec;
    auto snapshot = [&](std::size_t i) {
        rec.snapshot_times.push_back(i * cfg.dt);
        rec.snapshots.push_back(psi);
    };
    snapshot(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        Vec c_psi = sys.C.m * psi;
        double a2 = c_psi.squaredNorm();
        double a = std::sqrt(a2);
        double p_jump = sys.nu * a2 * cfg.dt;
        if (p_jump > 0.1 && !cfg.force)
            throw PreconditionError(
                "counting filter: nu ||C psi||^2 dt > 0.1, refuse dt");
        bool jump = noise.uniform() < p_jump;
        if (jump && a <= 1e-12)
            throw PreconditionError(
                "counting filter: collapse operator annihilates state at a jump");
        // Smooth drift between jumps.
        Vec drift = -((sys.nu / 2.0) * (cc * psi - a2 * psi)) -
                    (kI / sys.hbar) * (sys.E.m * psi);
        psi = psi + drift * cfg.dt;
        double dn = 0.0;
        if (jump) {
            Vec jumped = sys.C.m * psi;
            psi = jumped / jumped.norm();
            dn = 1.0;
            rec.jump_times.push_back((i + 1) * cfg.dt);
            ++rec.jump_count;
        }
        if (cfg.renormalize_each_step) psi.normalize();
        if (cfg.record_increments)
            rec.innovation.push_back(dn / (root_nu * a) -
                                     root_nu * a * cfg.dt);
        if (is_snapshot_step(i + 1, n_steps, cfg.snapshot_stride))
            snapshot(i + 1);
    }
    return rec;
}

const Mat& MasterTrajectory::at_time(double t, double tol) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= tol) return rho[i];
    throw PreconditionError("MasterTrajectory: no snapshot at requested time");
}

MasterTrajectory master_equation_evolve(const FilterSystem& sys,
                                        const DensityOperator& rho0,
                                        double dt, double t_end) {
    if (dt <= 0.0 || t_end <= 0.0 || dt > t_end)
        throw PreconditionError("master_equation_evolve: bad step or horizon");
    if (rho0.dim() != sys.dim())
        throw DimensionMismatch("master_equation_evolve: state dimension");
    Mat k = sys.K().m;
    auto rhs = [&](const Mat& r) -> Mat {
        return -(k * r) - r * k.adjoint() + sys.L.m * r * sys.L.m.adjoint();
    };
    std::size_t n_steps = std::size_t(std::llround(t_end / dt));
    MasterTrajectory out;
    Mat rho = rho0.op.m;
    out.times.push_back(0.0);
    out.rho.push_back(rho);
    bool small = sys.dim() <= 8;
    for (std::size_t i = 0; i < n_steps; ++i) {
        Mat k1 = rhs(rho);
        Mat k2 = rhs(rho + 0.5 * dt * k1);
        Mat k3 = rhs(rho + 0.5 * dt * k2);
        Mat k4 = rhs(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(rho.trace().real() - 1.0) > 1e-8 * (i + 1) * dt + 1e-9)
            throw PreconditionError("master_equation_evolve: trace drift");
        if (small) {
            Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-8)
                throw PreconditionError(
                    "master_equation_evolve: positivity violated, reduce dt");
        }
        out.times.push_back((i + 1) * dt);
        out.rho.push_back(rho);
    }
    return out;
}

DensityOperator ensemble_average(const std::vector<TrajectoryRecord>& records,
                                 double t, EnsembleWeighting weighting) {
    if (records.empty())
        throw PreconditionError("ensemble_average: empty ensemble");
    auto find_index = [&](const TrajectoryRecord& r) -> std::size_t {
        for (std::size_t i = 0; i < r.snapshot_times.size(); ++i)
            if (std::abs(r.snapshot_times[i] - t) <= 1e-9) return i;
        throw PreconditionError("ensemble_average: time not on snapshot grid");
    };
    std::size_t idx0 = find_index(records.front());
    Eigen::Index n = records.front().snapshots[idx0].size();
    Mat acc = Mat::Zero(n, n);
    double total_weight = 0.0;
    for (const auto& r : records) {
        std::size_t idx = find_index(r);
        const Vec& s = r.snapshots[idx];
        if (s.size() != n)
            throw DimensionMismatch("ensemble_average: mixed dimensions");
        if (weighting == EnsembleWeighting::input_measure_weighted) {
            // ||chi||^2 P_{chi/||chi||} = chi chi+.
            acc += s * s.adjoint();
            total_weight += s.squaredNorm();
        } else {
            Vec u = s.normalized();
            acc += u * u.adjoint();
            total_weight += 1.0;
        }
    }
    return DensityOperator(Operator(acc / total_weight));
}

double trace_distance(const Mat& a, const Mat& b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    return trace_distance(a.op.m, b.op.m);
}

FilterSystem PositionModel::system() const {
    Eigen::Index n = x.size();
    Mat l = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        l(i, i) = std::sqrt(lambda / 2.0) * x(i);
    return FilterSystem(hbar, Operator(hamiltonian), Operator(l));
}

double PositionModel::mean_position(const Vec& psi) const {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        double p = std::norm(psi(i));
        num += x(i) * p;
        den += p;
    }
    return num / den;
}

double PositionModel::position_variance(const Vec& psi) const {
    double q = mean_position(psi);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        double p = std::norm(psi(i));
        num += (x(i) - q) * (x(i) - q) * p;
        den += p;
    }
    return num / den;
}

PositionModel position_observation_system(
    double mass, double lambda, double hbar,
    const std::function<double(double)>& potential, int n, double x_min,
    double x_max) {
    if (mass <= 0.0 || hbar <= 0.0 || lambda < 0.0)
        throw PreconditionError("position model: bad physical parameters");
    if (n < 4 || (n & (n - 1)) != 0)
        throw PreconditionError("position model: grid size must be a power of two");
    if (x_max <= x_min)
        throw PreconditionError("position model: empty grid extent");

    PositionModel model;
    model.mass = mass;
    model.lambda = lambda;
    model.hbar = hbar;
    model.x.resize(n);
    model.dx = (x_max - x_min) / n;
    for (int i = 0; i < n; ++i) model.x(i) = x_min + i * model.dx;

    // Spectral kinetic energy: F+ diag((hbar k)^2 / 2m) F on the periodic grid.
    Mat fourier(n, n);
    double root_n = std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            fourier(j, k) =
                std::exp(Complex(0.0, -2.0 * M_PI * j * k / n)) / root_n;
    Eigen::VectorXd kinetic(n);
    double dk = 2.0 * M_PI / (n * model.dx);
    for (int j = 0; j < n; ++j) {
        int m_j = j < n / 2 ? j : j - n;
        double p = hbar * dk * m_j;
        kinetic(j) = p * p / (2.0 * mass);
    }
    model.hamiltonian = fourier.adjoint() * kinetic.asDiagonal() * fourier;
    for (int i = 0; i < n; ++i)
        model.hamiltonian(i, i) += potential(model.x(i));
    // Symmetrize away roundoff so FilterSystem's Hermiticity check is exact.
    model.hamiltonian = 0.5 * (model.hamiltonian + model.hamiltonian.adjoint()).eval();
    return model;
}

Complex stationary_packet_width(double mass, double lambda, double hbar) {
    if (lambda <= 0.0)
        throw PreconditionError("stationary packet exists only for lambda > 0");
    double mag = std::sqrt(lambda * mass / hbar);
    return mag * std::exp(Complex(0.0, -M_PI / 4.0));
}

Vec gaussian_packet(const PositionModel& model, Complex gamma, double center,
                    double velocity) {
    if (gamma.real() <= 0.0)
        throw PreconditionError("gaussian_packet: Re(gamma) must be positive");
    double sigma = 1.0 / std::sqrt(2.0 * gamma.real());
    if (sigma < 2.0 * model.dx)
        throw PreconditionError("gaussian_packet: grid too coarse for packet");
    Eigen::Index n = model.x.size();
    Vec psi(n);
    double mv = model.mass * velocity / model.hbar;
    for (Eigen::Index i = 0; i < n; ++i) {
        double u = model.x(i) - center;
        psi(i) = std::exp(-gamma * (u * u) / 2.0 + Complex(0.0, mv * u));
    }
    psi.normalize();
    return psi;
}

ConditionedFilterResult filter_conditioned_on_record(
    const PositionModel& model, const Vec& psi0,
    const std::function<double(double)>& record, double dt, double t_end) {
    if (dt <= 0.0 || t_end <= 0.0)
        throw PreconditionError("filter_conditioned_on_record: bad step");
    Eigen::Index n = model.x.size();
    if (psi0.size() != n)
        throw DimensionMismatch("filter_conditioned_on_record: state size");

    // Pathwise (Stratonovich) form of the posterior equation for a smooth
    // registered record: d psi/dt = [-(i/hbar) H - (lambda/2)(x - q)^2
    //                                + lambda (y(t) - q)(x - q)] psi.
    auto rhs = [&](const Vec& psi, double t) -> Vec {
        Vec out = Complex(0.0, -1.0 / model.hbar) * (model.hamiltonian * psi);
        if (model.lambda > 0.0) {
            double norm2 = psi.squaredNorm();
            double q = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                q += model.x(i) * std::norm(psi(i));
            q /= norm2;
            double y = record(t);
            for (Eigen::Index i = 0; i < n; ++i) {
                double u = model.x(i) - q;
                out(i) += (model.lambda * (y - q) * u -
                           0.5 * model.lambda * u * u) *
                          psi(i);
            }
        }
        return out;
    };

    std::size_t n_steps = std::size_t(std::llround(t_end / dt));
    Vec psi = psi0.normalized();
    ConditionedFilterResult res;
    res.times.reserve(n_steps + 1);
    res.mean.reserve(n_steps + 1);
    res.dispersion.reserve(n_steps + 1);
    auto log_state = [&](double t) {
        res.times.push_back(t);
        res.mean.push_back(model.mean_position(psi));
        res.dispersion.push_back(model.position_variance(psi));
    };
    log_state(0.0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        double t = i * dt;
        Vec k1 = rhs(psi, t);
        Vec k2 = rhs(psi + 0.5 * dt * k1, t + 0.5 * dt);
        Vec k3 = rhs(psi + 0.5 * dt * k2, t + 0.5 * dt);
        Vec k4 = rhs(psi + dt * k3, t + dt);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        psi.normalize();
        log_state((i + 1) * dt);
    }
    res.final_state = psi;
    return res;
}

}  // namespace qsf
