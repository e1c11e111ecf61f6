#ifndef QSF_FILTERING_HPP
#define QSF_FILTERING_HPP

#include "qsf/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qsf {

/// Continuous-measurement model (hbar, H, L); K is derived, never stored.
struct FilterSystem {
    double hbar = 1.0;
    Operator H;  // Hermitian
    Operator L;  // coupling, units (time)^(-1/2)

    FilterSystem() = default;
    FilterSystem(double hbar_, Operator h, Operator l, double tol = 1e-10);

    /// K = (1/2) L+L + (i/hbar) H; satisfies K + K+ = L+L.
    Operator K() const;
    Eigen::Index dim() const { return H.dim(); }
};

/// Counting-observation model (hbar, E, C, nu) with induced diffusive
/// parameters L = nu^(1/2)(C - I), H = E + i(nu/2)(C - C+).
struct CountingSystem {
    double hbar = 1.0;
    Operator E;  // Hermitian energy operator
    Operator C;  // collapse operator
    double nu = 1.0;

    CountingSystem() = default;
    CountingSystem(double hbar_, Operator e, Operator c, double nu_,
                   double tol = 1e-10);

    FilterSystem induced() const;
    Eigen::Index dim() const { return E.dim(); }
};

/// C = I + nu^(-1/2) L, E = H + (nu^(1/2)/2i)(L - L+); the nu -> inf limit
/// of the counting filter is the diffusive filter with (L, H).
CountingSystem central_limit_bridge(const FilterSystem& sys, double nu);

enum class Scheme { euler_maruyama, heun_drift };

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::euler_maruyama;
    std::uint64_t seed = 0;
    bool renormalize_each_step = true;  // nonlinear filters only
    // Snapshot every `snapshot_stride` steps (0 = initial and final only).
    int snapshot_stride = 0;
    bool record_increments = false;
    bool force = false;  // override the dt*||K|| <= 0.1 stability guard
    // Odd trajectory indices reuse the even partner's noise stream with
    // flipped sign; unbiased variance reduction for ensemble averages.
    bool antithetic = false;

    void validate() const;
};

/// One Monte Carlo sample path.
struct TrajectoryRecord {
    std::vector<double> snapshot_times;
    std::vector<Vec> snapshots;          // state at each snapshot time
    std::vector<double> norm2;           // ||chi||^2 weights (linear only)
    std::vector<double> dy;              // observation increments (optional)
    std::vector<double> innovation;      // innovation increments (optional)
    std::vector<double> jump_times;      // counting only
    std::size_t jump_count = 0;
};

/// Linear stochastic decoherence equation
/// d chi + K chi dt = L chi dy, driven by input-measure Wiener increments.
TrajectoryRecord simulate_linear_diffusive(const FilterSystem& sys,
                                           const StateVector& psi0,
                                           const IntegratorConfig& cfg,
                                           std::uint64_t trajectory_index = 0);

/// Nonlinear posterior filter with innovation dy~ a standard Wiener
/// process under the output measure. If `external_innovation` is given it
/// supplies the dy~ increments instead of fresh noise.
TrajectoryRecord simulate_filter_diffusive(
    const FilterSystem& sys, const StateVector& psi0,
    const IntegratorConfig& cfg, std::uint64_t trajectory_index = 0,
    const std::vector<double>* external_innovation = nullptr);

/// Counting (jump) filter: smooth drift between jumps, jumps by thinning
/// with conditional rate nu ||C psi||^2, state -> C psi / ||C psi|| at a jump.
TrajectoryRecord simulate_filter_counting(const CountingSystem& sys,
                                          const StateVector& psi0,
                                          const IntegratorConfig& cfg,
                                          std::uint64_t trajectory_index = 0);

/// Deterministic master equation d rho/dt + K rho + rho K+ = L rho L+,
/// fixed-step 4th order.
struct MasterTrajectory {
    std::vector<double> times;
    std::vector<Mat> rho;

    const Mat& at_time(double t, double tol = 1e-9) const;
};
MasterTrajectory master_equation_evolve(const FilterSystem& sys,
                                        const DensityOperator& rho0,
                                        double dt, double t_end);

enum class EnsembleWeighting { output_measure, input_measure_weighted };

/// rho(t) estimate: plain average of projectors (output measure) or
/// ||chi||^2-weighted average (input measure, linear records).
DensityOperator ensemble_average(const std::vector<TrajectoryRecord>& records,
                                 double t, EnsembleWeighting weighting);

/// (1/2) ||rho1 - rho2||_1.
double trace_distance(const DensityOperator& a, const DensityOperator& b);
double trace_distance(const Mat& a, const Mat& b);

// --- Indirect position observation on a spatial grid ---------------------

/// dY = (2 lambda)^(1/2) X dt + dy with L = (lambda/2)^(1/2) x and
/// H = p^2/2m + phi(x); p is built by spectral differentiation on a
/// periodic grid (N a power of two).
struct PositionModel {
    double mass = 1.0;
    double lambda = 0.0;  // observation accuracy
    double hbar = 1.0;
    Eigen::VectorXd x;    // grid points
    double dx = 0.0;
    Mat hamiltonian;

    FilterSystem system() const;
    double mean_position(const Vec& psi) const;
    double position_variance(const Vec& psi) const;
};

PositionModel position_observation_system(
    double mass, double lambda, double hbar,
    const std::function<double(double)>& potential, int n, double x_min,
    double x_max);

/// Normalized Gaussian packet exp(-gamma (x-center)^2 / 2
/// + i m v (x-center)/hbar) on the model grid. Throws if the packet
/// dispersion falls below two grid cells.
Vec gaussian_packet(const PositionModel& model, Complex gamma, double center,
                    double velocity);

/// Complex width of the stationary posterior packet,
/// gamma = sqrt(lambda m / hbar) * exp(-i pi/4); its variance
/// 1/(2 Re gamma) equals (hbar / 2 lambda m)^(1/2).
Complex stationary_packet_width(double mass, double lambda, double hbar);

/// Posterior filter conditioned on a smooth registered record y(t):
/// the pathwise form of the position filter, integrated by RK4 with
/// per-step renormalization. Records the posterior mean and dispersion.
struct ConditionedFilterResult {
    std::vector<double> times;
    std::vector<double> mean;        // q(t) = <x>
    std::vector<double> dispersion;  // <(x - q)^2>
    Vec final_state;
};
ConditionedFilterResult filter_conditioned_on_record(
    const PositionModel& model, const Vec& psi0,
    const std::function<double(double)>& record, double dt, double t_end);

}  // namespace qsf

#endif
