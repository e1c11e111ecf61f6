// Scenario front end: configure a model, run it to data files, or verify
// its invariant suite. Exit codes: 0 pass, 1 invariant failure,
// 2 validation error, 3 I/O error.

#include "qsf/filtering.hpp"
#include "qsf/free_particle.hpp"
#include "qsf/io.hpp"
#include "qsf/ito.hpp"
#include "qsf/measurement.hpp"
#include "qsf/operators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

using namespace qsf;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
    std::string scenario;
    std::string mode;  // run | verify
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double t_end = 1.0;
    int trajectories = 1;
    int workers = 1;
    std::string output;
    std::string format = "csv";
    std::string config;

    // scenario parameters
    double amp0 = 1.0 / std::sqrt(2.0);
    double amp1 = 1.0 / std::sqrt(2.0);
    double gamma = 1.0;
    double nu = 100.0;
    double lambda = 2.0;
    double mass = 1.0;
    double hbar = 1.0;
    double u = 0.5;
    double q = 1.0;
    double v0 = 5.5;
    int grid = 256;
};

class Report {
  public:
    void check(const std::string& name, bool ok, double measured,
               double bound) {
        std::printf("%s  %s (measured %.6g, bound %.6g)\n", ok ? "PASS" : "FAIL",
                    name.c_str(), measured, bound);
        if (!ok) ++failures_;
    }
    int exit_code() const { return failures_ > 0 ? 1 : 0; }

  private:
    int failures_ = 0;
};

void parallel_traj(std::size_t n, int workers,
                   const std::function<void(std::size_t)>& body) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = std::size_t(w); i < n;
                 i += std::size_t(workers))
                body(i);
        });
    for (auto& t : pool) t.join();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct OutputFile {
    std::ofstream stream;
    std::string path;

    explicit OutputFile(const std::string& p) : stream(p), path(p) {
        if (!stream) throw std::ios_base::failure("cannot open " + p);
    }
    void close() {
        stream.close();
        if (!stream) throw std::ios_base::failure("write failed: " + path);
    }
};

std::string resolve_output(const Options& opt, const std::string& ext) {
    if (!opt.output.empty()) return opt.output;
    std::string dir = ".";
    if (const char* env = std::getenv("QSIM_OUTPUT_DIR")) dir = env;
    return dir + "/" + opt.scenario + "." + ext;
}

json params_json(const Options& opt) {
    return {{"amp0", opt.amp0},     {"amp1", opt.amp1}, {"gamma", opt.gamma},
            {"nu", opt.nu},         {"lambda", opt.lambda},
            {"mass", opt.mass},     {"hbar", opt.hbar}, {"u", opt.u},
            {"q", opt.q},           {"v0", opt.v0},     {"grid", opt.grid}};
}

void write_manifest(const Options& opt, const std::vector<std::string>& outputs,
                    double wall_ms) {
    if (outputs.empty()) return;
    json m = {{"scenario", opt.scenario},
              {"mode", opt.mode},
              {"seed", opt.seed},
              {"dt", opt.dt},
              {"t_end", opt.t_end},
              {"trajectories", opt.trajectories},
              {"workers", opt.workers},
              {"format", opt.format},
              {"parameters", params_json(opt)},
              {"version", kVersion},
              {"wall_ms", wall_ms},
              {"outputs", outputs}};
    OutputFile f(outputs.front() + ".manifest.json");
    f.stream << m.dump(2) << "\n";
    f.close();
}

// Time series row sink writing either CSV or JSONL.
class Sink {
  public:
    Sink(OutputFile& f, bool jsonl, std::vector<std::string> columns)
        : f_(f), jsonl_(jsonl), columns_(std::move(columns)) {
        if (!jsonl_) {
            for (std::size_t i = 0; i < columns_.size(); ++i)
                f_.stream << (i ? "," : "") << columns_[i];
            f_.stream << "\n";
        }
    }
    void row(const std::vector<double>& values) {
        if (jsonl_) {
            json j;
            for (std::size_t i = 0; i < columns_.size(); ++i)
                j[columns_[i]] = values[i];
            f_.stream << j.dump() << "\n";
        } else {
            for (std::size_t i = 0; i < values.size(); ++i)
                f_.stream << (i ? "," : "") << fmt(values[i]);
            f_.stream << "\n";
        }
    }

  private:
    OutputFile& f_;
    bool jsonl_;
    std::vector<std::string> columns_;
};

double sigma_z(const Vec& psi) {
    return (std::norm(psi(0)) - std::norm(psi(1))) / psi.squaredNorm();
}

StateVector cat_input(const Options& opt) {
    Vec v(2);
    v << opt.amp0, opt.amp1;
    double n = v.norm();
    if (n < 1e-12)
        throw PreconditionError("cat: amplitudes must not both vanish");
    return StateVector(Vec(v / n));
}

FilterSystem dephasing(const Options& opt) {
    return FilterSystem(opt.hbar, Operator::zero(2),
                        Operator(Mat(std::sqrt(opt.gamma) * pauli_z().m)));
}

StateVector plus_state() {
    Vec v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(v);
}

// --- run -----------------------------------------------------------------

std::vector<std::string> run_cat(const Options& opt) {
    DecoherenceResult r = decohere(cat_interact(cat_input(opt)));
    double s = entropy_bits(r.atom);
    std::printf("entropy: %.12g bits\n", s);
    std::printf("block density:\n");
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j)
            std::printf(" %8.5f", r.joint.op.m(i, j).real());
        std::printf("\n");
    }
    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl", {"outcome", "probability"});
    sink.row({0.0, r.probabilities[0]});
    sink.row({1.0, r.probabilities[1]});
    f.close();
    return {f.path};
}

std::vector<std::string> run_ito_tables(const Options& opt) {
    OutputFile f(resolve_output(opt, "txt"));
    auto names = {BasisName::dt, BasisName::dw, BasisName::dm,
                  BasisName::e_minus, BasisName::e_plus, BasisName::e};
    auto label = [](BasisName n) {
        switch (n) {
            case BasisName::dt: return "dt";
            case BasisName::dw: return "dw";
            case BasisName::dm: return "dm";
            case BasisName::e_minus: return "e_-";
            case BasisName::e_plus: return "e^+";
            default: return "e";
        }
    };
    for (auto a : names)
        for (auto b : names)
            f.stream << label(a) << " * " << label(b) << " = "
                     << ItoExpansion::from_element(multiply(basis(a), basis(b)))
                            .to_string()
                     << "\n";
    f.close();
    return {f.path};
}

IntegratorConfig base_config(const Options& opt) {
    IntegratorConfig cfg;
    cfg.dt = opt.dt;
    cfg.t_end = opt.t_end;
    cfg.seed = opt.seed;
    return cfg;
}

std::vector<std::string> run_dephasing_diffusive(const Options& opt) {
    FilterSystem sys = dephasing(opt);
    IntegratorConfig cfg = base_config(opt);
    cfg.snapshot_stride = 1;
    cfg.record_increments = true;
    TrajectoryRecord rec = simulate_filter_diffusive(sys, plus_state(), cfg, 0);

    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl",
              {"t", "jump_flag", "dy", "dy_tilde", "norm2", "re_sigma_z",
               "im_sigma_z"});
    for (std::size_t i = 0; i < rec.snapshot_times.size(); ++i) {
        double dy = i > 0 ? rec.dy[i - 1] : 0.0;
        double dyt = i > 0 ? rec.innovation[i - 1] : 0.0;
        sink.row({rec.snapshot_times[i], 0.0, dy, dyt, 1.0,
                  sigma_z(rec.snapshots[i]), 0.0});
    }
    f.close();
    std::vector<std::string> outputs = {f.path};

    if (opt.trajectories > 1) {
        std::size_t m = std::size_t(opt.trajectories);
        IntegratorConfig ecfg = base_config(opt);
        ecfg.antithetic = true;
        std::vector<TrajectoryRecord> recs(m);
        parallel_traj(m, opt.workers, [&](std::size_t i) {
            recs[i] = simulate_filter_diffusive(sys, plus_state(), ecfg, i);
        });
        DensityOperator avg = ensemble_average(
            recs, ecfg.t_end, EnsembleWeighting::output_measure);
        MasterTrajectory mt = master_equation_evolve(
            sys, DensityOperator::pure(plus_state()), ecfg.dt, ecfg.t_end);
        json summary = {
            {"t", ecfg.t_end},
            {"trajectories", opt.trajectories},
            {"rho_ensemble", to_json(avg.op)},
            {"rho_master", to_json(Operator(mt.at_time(ecfg.t_end)))},
            {"trace_distance",
             trace_distance(avg.op.m, mt.at_time(ecfg.t_end))}};
        OutputFile sf(f.path + ".summary.json");
        sf.stream << summary.dump(2) << "\n";
        sf.close();
        outputs.push_back(sf.path);
    }
    return outputs;
}

std::vector<std::string> run_dephasing_counting(const Options& opt) {
    CountingSystem sys(opt.hbar, Operator::zero(2), pauli_x(), opt.nu);
    IntegratorConfig cfg = base_config(opt);
    cfg.snapshot_stride = 1;
    cfg.record_increments = true;
    Vec ground = Vec::Zero(2);
    ground(0) = 1.0;
    TrajectoryRecord rec =
        simulate_filter_counting(sys, StateVector(ground), cfg, 0);

    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl",
              {"t", "jump_flag", "dy", "dy_tilde", "norm2", "re_sigma_z",
               "im_sigma_z"});
    std::size_t jump_idx = 0;
    for (std::size_t i = 0; i < rec.snapshot_times.size(); ++i) {
        double t = rec.snapshot_times[i];
        double dn = 0.0;
        while (jump_idx < rec.jump_times.size() &&
               rec.jump_times[jump_idx] <= t + 1e-12) {
            dn += 1.0;
            ++jump_idx;
        }
        double dyt = i > 0 ? rec.innovation[i - 1] : 0.0;
        sink.row({t, dn, dn, dyt, 1.0, sigma_z(rec.snapshots[i]), 0.0});
    }
    f.close();
    return {f.path};
}

struct CoupledPair {
    TrajectoryRecord counting;
    TrajectoryRecord diffusive;
};

CoupledPair coupled_pair(const Options& opt, double nu, std::uint64_t index,
                         int stride) {
    FilterSystem base = dephasing(opt);
    CountingSystem bridge = central_limit_bridge(base, nu);
    IntegratorConfig cfg;
    cfg.dt = 0.0025 / nu;
    cfg.t_end = opt.t_end;
    cfg.seed = opt.seed;
    cfg.snapshot_stride = stride;
    cfg.record_increments = true;
    Vec tilted(2);
    tilted << std::cos(0.4), std::sin(0.4);
    StateVector psi0{tilted};
    CoupledPair pair;
    pair.counting = simulate_filter_counting(bridge, psi0, cfg, index);
    IntegratorConfig dcfg = cfg;
    dcfg.record_increments = false;
    pair.diffusive = simulate_filter_diffusive(base, psi0, dcfg, index,
                                               &pair.counting.innovation);
    return pair;
}

std::vector<std::string> run_central_limit(const Options& opt) {
    int steps = int(std::llround(opt.t_end * opt.nu / 0.0025));
    int stride = std::max(1, steps / 10000);
    CoupledPair pair = coupled_pair(opt, opt.nu, 0, stride);
    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl",
              {"t", "sigma_z_counting", "sigma_z_diffusive", "gap"});
    for (std::size_t i = 0; i < pair.counting.snapshot_times.size(); ++i) {
        double zc = sigma_z(pair.counting.snapshots[i]);
        double zd = sigma_z(pair.diffusive.snapshots[i]);
        sink.row({pair.counting.snapshot_times[i], zc, zd, std::abs(zc - zd)});
    }
    f.close();
    return {f.path};
}

struct CollapseSetup {
    PositionModel model;
    ObservedParticle particle;
    Vec psi0;
    std::function<double(double)> record;
};

CollapseSetup collapse_setup(const Options& opt) {
    CollapseSetup s;
    s.particle =
        ObservedParticle(opt.mass, opt.lambda, opt.hbar, 0.0, opt.v0);
    s.model = position_observation_system(
        opt.mass, opt.lambda, opt.hbar, [](double) { return 0.0; }, opt.grid,
        -16.0, 16.0);
    double u = opt.u, q = opt.q;
    s.record = [u, q](double t) { return u * t - q; };
    double kappa = s.particle.kappa();
    // Packet momentum absorbs the measurement gain so the initial mean
    // velocity equals v0.
    double packet_v = opt.v0 + 2.0 * kappa * (0.0 - s.record(0.0));
    s.psi0 = gaussian_packet(
        s.model, stationary_packet_width(opt.mass, opt.lambda, opt.hbar), 0.0,
        packet_v);
    return s;
}

std::vector<std::string> run_position_collapse(const Options& opt) {
    CollapseSetup s = collapse_setup(opt);
    ConditionedFilterResult res = filter_conditioned_on_record(
        s.model, s.psi0, s.record, opt.dt, opt.t_end);
    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl",
              {"t", "q_filter", "q_closed_form", "dispersion", "y"});
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        double t = res.times[i];
        sink.row({t, res.mean[i], appendix_q(s.particle, opt.u, opt.q, t),
                  res.dispersion[i], s.record(t)});
    }
    f.close();
    return {f.path};
}

std::vector<std::string> run_appendix_figure(const Options& opt) {
    ObservedParticle p(opt.mass, opt.lambda, opt.hbar, 0.0, opt.v0);
    double t_end = opt.t_end > 1.0 ? opt.t_end : 6.0;
    ConsistencyReport rep =
        consistency_check(p, opt.u, opt.q, t_end, opt.dt);
    OutputFile f(resolve_output(opt, opt.format == "jsonl" ? "jsonl" : "csv"));
    Sink sink(f, opt.format == "jsonl",
              {"t", "q_numeric", "q_closed_form", "y", "z"});
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        double t = rep.times[i];
        double y = opt.u * t - opt.q;
        sink.row({t, rep.q_numeric[i], rep.q_closed_form[i], y,
                  rep.q_numeric[i] - y});
    }
    f.close();
    return {f.path};
}

// --- verify --------------------------------------------------------------

int verify_cat(const Options& opt) {
    Report rep;
    DecoherenceResult equal = decohere(cat_interact(plus_state()));
    rep.check("equal-weight branch entropy is one bit",
              std::abs(entropy_bits(equal.atom) - 1.0) <= 1e-12,
              entropy_bits(equal.atom), 1.0);

    StateVector psi = cat_input(opt);
    DecoherenceResult r = decohere(cat_interact(psi));
    double p0 = std::norm(psi.v(0));
    double expect = 0.0;
    for (double w : {p0, 1.0 - p0})
        if (w > 1e-15) expect -= w * std::log2(w);
    rep.check("branch entropy matches the weight formula",
              std::abs(entropy_bits(r.atom) - expect) <= 1e-9,
              entropy_bits(r.atom), expect);
    rep.check("joint and reduced entropies agree",
              std::abs(entropy_bits(r.joint) - entropy_bits(r.atom)) <= 1e-9,
              entropy_bits(r.joint), entropy_bits(r.atom));
    return rep.exit_code();
}

int verify_ito_tables(const Options&) {
    Report rep;
    auto dt = basis(BasisName::dt);
    auto dw = basis(BasisName::dw);
    auto dm = basis(BasisName::dm);
    auto exact = [](const ItoElement& a, const ItoElement& b) {
        return (a.m - b.m).cwiseAbs().maxCoeff();
    };
    rep.check("(dw)^2 = dt", multiply(dw, dw) == dt,
              exact(multiply(dw, dw), dt), 0.0);
    rep.check("(dm)^2 = dm + dt", multiply(dm, dm) == dm + dt,
              exact(multiply(dm, dm), dm + dt), 0.0);
    rep.check("dw dm != dm dw", !(multiply(dw, dm) == multiply(dm, dw)),
              exact(multiply(dw, dm), multiply(dm, dw)), 0.0);
    rep.check("dw dm - dt = e_-",
              multiply(dw, dm) - dt == basis(BasisName::e_minus),
              exact(multiply(dw, dm) - dt, basis(BasisName::e_minus)), 0.0);
    rep.check("dm dw - dt = e^+",
              multiply(dm, dw) - dt == basis(BasisName::e_plus),
              exact(multiply(dm, dw) - dt, basis(BasisName::e_plus)), 0.0);
    rep.check("dm - dw = e", dm - dw == basis(BasisName::e),
              exact(dm - dw, basis(BasisName::e)), 0.0);
    bool hp_ok = true;
    for (int mu = 0; mu <= 1; ++mu)
        for (int iota = 0; iota <= 1; ++iota)
            for (int kappa = 0; kappa <= 1; ++kappa)
                for (int nu = 0; nu <= 1; ++nu) {
                    ItoExpansion a(1), b(1);
                    a.at(mu, iota == 0 ? 2 : iota) = 1.0;
                    b.at(kappa, nu == 0 ? 2 : nu) = 1.0;
                    hp_ok = hp_ok &&
                            multiply(a.to_element(), b.to_element()) ==
                                hp_product(iota, mu, nu, kappa, 1).to_element();
                }
    rep.check("fundamental product table reproduced", hp_ok, hp_ok ? 0.0 : 1.0,
              0.0);
    return rep.exit_code();
}

int verify_dephasing_diffusive(const Options& opt) {
    Report rep;
    FilterSystem sys = dephasing(opt);
    std::size_t m = std::size_t(opt.trajectories > 1 ? opt.trajectories : 10000);
    IntegratorConfig cfg = base_config(opt);

    IntegratorConfig lin_cfg = cfg;
    lin_cfg.renormalize_each_step = false;
    std::vector<double> w(m);
    parallel_traj(m, opt.workers, [&](std::size_t i) {
        w[i] = simulate_linear_diffusive(sys, plus_state(), lin_cfg, i)
                   .norm2.back();
    });
    double mean = std::accumulate(w.begin(), w.end(), 0.0) / double(m);
    double var = 0.0;
    for (double x : w) var += (x - mean) * (x - mean);
    var /= double(m - 1);
    double se = std::sqrt(var / double(m));
    rep.check("mean square norm within 4 SE of one",
              std::abs(mean - 1.0) <= 4.0 * se, mean, 1.0);

    IntegratorConfig ecfg = cfg;
    ecfg.antithetic = true;
    std::vector<TrajectoryRecord> recs(m);
    parallel_traj(m, opt.workers, [&](std::size_t i) {
        recs[i] = simulate_filter_diffusive(sys, plus_state(), ecfg, i);
    });
    MasterTrajectory mt = master_equation_evolve(
        sys, DensityOperator::pure(plus_state()), cfg.dt, cfg.t_end);
    double d = trace_distance(
        ensemble_average(recs, cfg.t_end, EnsembleWeighting::output_measure)
            .op.m,
        mt.at_time(cfg.t_end));
    rep.check("filter ensemble within 0.02 of the master state", d <= 0.02, d,
              0.02);

    double analytic =
        0.5 * std::exp(-2.0 * opt.gamma * cfg.t_end);
    double off = std::abs(mt.at_time(cfg.t_end)(0, 1).real() - analytic) /
                 analytic;
    rep.check("master off-diagonal matches exp(-2 gamma t)", off <= 1e-6, off,
              1e-6);
    return rep.exit_code();
}

int verify_dephasing_counting(const Options& opt) {
    Report rep;
    CountingSystem sys(opt.hbar, Operator::zero(2), pauli_x(), opt.nu);
    IntegratorConfig cfg = base_config(opt);
    cfg.t_end = 10.0 / opt.nu;
    cfg.dt = std::min(opt.dt, 0.05 / opt.nu);
    std::size_t m = std::size_t(opt.trajectories > 1 ? opt.trajectories : 10000);
    Vec ground = Vec::Zero(2);
    ground(0) = 1.0;
    std::vector<double> counts(m);
    std::vector<char> alternates(m);
    parallel_traj(m, opt.workers, [&](std::size_t i) {
        TrajectoryRecord r =
            simulate_filter_counting(sys, StateVector(ground), cfg, i);
        counts[i] = double(r.jump_count);
        double excited = std::norm(r.snapshots.back()(1));
        alternates[i] =
            std::abs(excited - double(r.jump_count % 2)) < 1e-9 ? 1 : 0;
    });
    double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / double(m);
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    var /= double(m - 1);
    double se = std::sqrt(var / double(m));
    double expect = opt.nu * cfg.t_end;
    rep.check("jump count within 4 SE of the Poisson mean",
              std::abs(mean - expect) <= 4.0 * se, mean, expect);
    bool all_alternate =
        std::all_of(alternates.begin(), alternates.end(),
                    [](char c) { return c == 1; });
    rep.check("every jump flips the qubit", all_alternate,
              all_alternate ? 1.0 : 0.0, 1.0);
    return rep.exit_code();
}

int verify_central_limit(const Options& opt) {
    Report rep;
    auto gap = [&](double nu, std::size_t m, std::uint64_t seed) {
        Options o = opt;
        o.seed = seed;
        o.t_end = 0.25;
        std::vector<double> g(m);
        parallel_traj(m, opt.workers, [&](std::size_t i) {
            CoupledPair pair = coupled_pair(o, nu, i, 0);
            g[i] = std::abs(sigma_z(pair.counting.snapshots.back()) -
                            sigma_z(pair.diffusive.snapshots.back()));
        });
        return std::accumulate(g.begin(), g.end(), 0.0) / double(m);
    };
    std::size_t m_small = std::size_t(opt.trajectories > 1 ? opt.trajectories : 2000);
    std::size_t m_large = std::max<std::size_t>(100, m_small / 5);
    double gap_small = gap(1e2, m_small, opt.seed);
    double gap_large = gap(1e4, m_large, opt.seed + 1);
    double ratio = gap_small / gap_large;
    rep.check("gap shrinks with intensity", gap_large < gap_small, gap_large,
              gap_small);
    rep.check("gap ratio consistent with square-root scaling",
              ratio >= 5.0 && ratio <= 20.0, ratio, 10.0);
    return rep.exit_code();
}

int verify_position_collapse(const Options& opt) {
    Report rep;
    CollapseSetup s = collapse_setup(opt);
    double kappa = s.particle.kappa();
    double t_end = 6.0 / kappa;
    ConditionedFilterResult res = filter_conditioned_on_record(
        s.model, s.psi0, s.record, opt.dt, t_end);
    double target =
        std::sqrt(opt.hbar / (2.0 * opt.lambda * opt.mass));
    double worst_disp = 0.0, worst_mean = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i)
        scale = std::max(
            scale, std::abs(appendix_q(s.particle, opt.u, opt.q, res.times[i])));
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        double t = res.times[i];
        if (t >= 5.0 / kappa)
            worst_disp =
                std::max(worst_disp, std::abs(res.dispersion[i] - target));
        worst_mean = std::max(
            worst_mean,
            std::abs(res.mean[i] - appendix_q(s.particle, opt.u, opt.q, t)));
    }
    rep.check("posterior dispersion settles within 5%",
              worst_disp <= 0.05 * target, worst_disp, 0.05 * target);
    rep.check("posterior mean tracks the closed form to 1e-2",
              worst_mean / scale <= 1e-2, worst_mean / scale, 1e-2);
    return rep.exit_code();
}

int verify_appendix_figure(const Options& opt) {
    Report rep;
    ObservedParticle p(opt.mass, opt.lambda, opt.hbar, 0.0, opt.v0);
    double worst = 0.0;
    for (int i = 0; i <= 600; ++i) {
        double t = i * 0.01;
        double expect =
            std::exp(-t) * (std::cos(t) + 6.0 * std::sin(t)) + 0.5 * t - 1.0;
        worst = std::max(worst,
                         std::abs(appendix_q(p, 0.5, 1.0, t) - expect));
    }
    rep.check("closed form reproduces the reference curve to 1e-12",
              worst <= 1e-12, worst, 1e-12);
    ConsistencyReport c = consistency_check(p, opt.u, opt.q, 6.0, 1e-3);
    rep.check("deviation reconstruction within 1e-6 relative",
              c.max_rel_error <= 1e-6, c.max_rel_error, 1e-6);
    return rep.exit_code();
}

// --- plumbing ------------------------------------------------------------

void apply_config(Options& opt, const CLI::App& app) {
    if (opt.config.empty()) return;
    std::ifstream in(opt.config);
    if (!in) throw std::ios_base::failure("cannot read config " + opt.config);
    json j = json::parse(in);
    auto load = [&](const char* flag, const char* key, auto& field) {
        if (j.contains(key) && app.count(flag) == 0)
            field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    load("--seed", "seed", opt.seed);
    load("--dt", "dt", opt.dt);
    load("--t-end", "t_end", opt.t_end);
    load("--trajectories", "trajectories", opt.trajectories);
    load("--workers", "workers", opt.workers);
    load("--output", "output", opt.output);
    load("--format", "format", opt.format);
    load("--amp0", "amp0", opt.amp0);
    load("--amp1", "amp1", opt.amp1);
    load("--gamma", "gamma", opt.gamma);
    load("--nu", "nu", opt.nu);
    load("--lambda", "lambda", opt.lambda);
    load("--mass", "mass", opt.mass);
    load("--u", "u", opt.u);
    load("--q", "q", opt.q);
    load("--v0", "v0", opt.v0);
    load("--grid", "grid", opt.grid);
}

int dispatch(Options& opt) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;
    int code = 0;
    if (opt.mode == "run") {
        if (opt.scenario == "cat") outputs = run_cat(opt);
        else if (opt.scenario == "ito-tables") outputs = run_ito_tables(opt);
        else if (opt.scenario == "dephasing-diffusive")
            outputs = run_dephasing_diffusive(opt);
        else if (opt.scenario == "dephasing-counting")
            outputs = run_dephasing_counting(opt);
        else if (opt.scenario == "central-limit")
            outputs = run_central_limit(opt);
        else if (opt.scenario == "position-collapse")
            outputs = run_position_collapse(opt);
        else if (opt.scenario == "appendix-figure")
            outputs = run_appendix_figure(opt);
        else
            throw PreconditionError("unknown scenario: " + opt.scenario);
    } else {
        if (opt.scenario == "cat") code = verify_cat(opt);
        else if (opt.scenario == "ito-tables") code = verify_ito_tables(opt);
        else if (opt.scenario == "dephasing-diffusive")
            code = verify_dephasing_diffusive(opt);
        else if (opt.scenario == "dephasing-counting")
            code = verify_dephasing_counting(opt);
        else if (opt.scenario == "central-limit")
            code = verify_central_limit(opt);
        else if (opt.scenario == "position-collapse")
            code = verify_position_collapse(opt);
        else if (opt.scenario == "appendix-figure")
            code = verify_appendix_figure(opt);
        else
            throw PreconditionError("unknown scenario: " + opt.scenario);
    }
    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    write_manifest(opt, outputs, wall_ms);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"quantum trajectory and filtering scenarios"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario,scenario", opt.scenario,
                        "cat | ito-tables | dephasing-diffusive | "
                        "dephasing-counting | central-limit | "
                        "position-collapse | appendix-figure");
        sub->add_option("--seed", opt.seed, "base RNG seed");
        sub->add_option("--dt", opt.dt, "integrator step");
        sub->add_option("--t-end", opt.t_end, "time horizon");
        sub->add_option("--trajectories", opt.trajectories, "ensemble size");
        sub->add_option("--workers", opt.workers, "worker threads");
        sub->add_option("--output", opt.output, "output file path");
        sub->add_option("--format", opt.format, "csv | jsonl")
            ->check(CLI::IsMember({"csv", "jsonl"}));
        sub->add_option("--config", opt.config, "JSON config file");
        sub->add_option("--amp0", opt.amp0, "cat amplitude on |0>");
        sub->add_option("--amp1", opt.amp1, "cat amplitude on |1>");
        sub->add_option("--gamma", opt.gamma, "dephasing rate");
        sub->add_option("--nu", opt.nu, "counting intensity");
        sub->add_option("--lambda", opt.lambda, "observation accuracy");
        sub->add_option("--mass", opt.mass, "particle mass");
        sub->add_option("--u", opt.u, "registered record slope");
        sub->add_option("--q", opt.q, "registered record offset");
        sub->add_option("--v0", opt.v0, "initial mean velocity");
        sub->add_option("--grid", opt.grid, "spatial grid size");
    };
    CLI::App* run = app.add_subcommand("run", "produce scenario data files");
    CLI::App* verify =
        app.add_subcommand("verify", "run the scenario invariant suite");
    add_common(run);
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    opt.mode = run->parsed() ? "run" : "verify";

    try {
        CLI::App* active = run->parsed() ? run : verify;
        apply_config(opt, *active);
        if (opt.scenario.empty())
            throw PreconditionError("no scenario given");
        if (opt.workers < 1 || opt.trajectories < 1)
            throw PreconditionError("workers and trajectories must be >= 1");
        return dispatch(opt);
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const DimensionMismatch& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    }
}
