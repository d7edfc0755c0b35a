#include "pqsd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pqsd {

namespace {

std::string num9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string numg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_metadata(std::ostream& os, const RunConfig& cfg) {
    os << "# pqsd result table, format v1\n";
    os << "# reproduce: pqsd run <this config>\n";
    std::istringstream cfg_text(serialize_config(cfg));
    std::string line;
    while (std::getline(cfg_text, line)) os << "# " << line << "\n";
}

std::size_t nearest_index(const TimeGrid& grid, double t) {
    const auto& p = grid.points();
    const auto it = std::lower_bound(p.begin(), p.end(), t);
    if (it == p.begin()) return 0;
    if (it == p.end()) return p.size() - 1;
    const auto j = static_cast<std::size_t>(it - p.begin());
    return (t - p[j - 1] <= p[j] - t) ? j - 1 : j;
}

}  // namespace

double curve_at(const FidelityCurve& curve, double t) {
    const auto& p = curve.grid.points();
    if (t <= p.front()) return curve.mean.front();
    if (t >= p.back()) return curve.mean.back();
    const auto it = std::upper_bound(p.begin(), p.end(), t);
    const auto j = static_cast<std::size_t>(it - p.begin());
    const double w = (t - p[j - 1]) / (p[j] - p[j - 1]);
    return (1.0 - w) * curve.mean[j - 1] + w * curve.mean[j];
}

FidelityCurve analytic_fidelity(const RunConfig& cfg, const TrajectoryContext& ctx) {
    const AnalyticContext actx = AnalyticContext::build(cfg.model, cfg.corr, ctx.detuning,
                                                        ctx.coeffs, cfg.analytic_coarsen);
    switch (cfg.model.family) {
        case ModelFamily::TwoLevel:
            return fidelity_two_level(actx);
        case ModelFamily::Qutrit:
            return fidelity_qutrit(actx);
        case ModelFamily::MultiLevel:
            return fidelity_multilevel(actx);
    }
    throw std::logic_error("analytic_fidelity: unreachable");
}

RunArtifacts run_experiment(const RunConfig& cfg, int threads, const std::string& out_override) {
    cfg.validate();
    const TimeGrid grid = cfg.make_grid();
    const Detuning detuning = cfg.make_detuning();
    const TrajectoryContext ctx = TrajectoryContext::build(cfg.model, cfg.corr, detuning, grid);

    EnsembleOptions opts;
    opts.n_traj = cfg.n_traj;
    opts.master_seed = cfg.master_seed;
    opts.threads = threads;
    opts.initial_state = cfg.initial_state;

    RunArtifacts art;
    art.ensemble = ensemble_fidelity(ctx, opts);
    art.quality_failed = art.ensemble.failed;
    if (cfg.analytic_enabled) art.analytic = analytic_fidelity(cfg, ctx);

    const std::filesystem::path dir =
        out_override.empty() ? std::filesystem::path(cfg.output_directory)
                             : std::filesystem::path(out_override);
    std::filesystem::create_directories(dir);
    const std::filesystem::path csv = dir / (cfg.output_label + ".csv");
    const std::filesystem::path gp = dir / (cfg.output_label + ".gp");

    {
        std::ofstream os(csv);
        if (!os) throw std::runtime_error("cannot write " + csv.string());
        write_metadata(os, cfg);
        os << "t,fidelity_mc,stderr_mc" << (cfg.analytic_enabled ? ",fidelity_analytic" : "")
           << ",n_traj,divergent_count\n";
        const FidelityCurve& mc = art.ensemble.fidelity;
        for (std::size_t j = 0; j < mc.grid.size(); ++j) {
            os << num9(mc.grid.t(j)) << ',' << num9(mc.mean[j]) << ',' << num9(mc.stderr_[j]);
            if (cfg.analytic_enabled) os << ',' << num9(curve_at(art.analytic, mc.grid.t(j)));
            os << ',' << mc.n_traj << ',' << art.ensemble.divergent_count << "\n";
        }
    }
    {
        std::ofstream os(gp);
        if (!os) throw std::runtime_error("cannot write " + gp.string());
        os << "# gnuplot script; the CSV is the canonical artifact\n";
        os << "set datafile separator ','\n";
        os << "set xlabel 'Gamma t'\nset ylabel 'fidelity'\n";
        os << "set yrange [0:1.05]\nset key bottom left\n";
        os << "plot '" << cfg.output_label << ".csv' using 1:2 with lines lw 2 title 'Monte Carlo'";
        if (cfg.analytic_enabled)
            os << ", \\\n     '" << cfg.output_label
               << ".csv' using 1:4 with lines dt 2 lw 2 title 'closed form'";
        os << "\n";
    }
    art.csv_path = csv.string();
    art.plot_path = gp.string();
    return art;
}

namespace {

RunConfig apply_axis(const RunConfig& base, const std::string& axis, double v) {
    RunConfig c = base;
    if (axis == "gamma") {
        c.corr.gamma = v;
    } else if (axis == "tau_over_delta") {
        if (!(c.pulse.delta > 0))
            throw ConfigError("sweep over tau_over_delta requires pulse.delta > 0");
        c.pulse.enabled = true;
        c.pulse.tau = v * c.pulse.delta;
    } else if (axis == "psi") {
        c.pulse.enabled = true;
        c.pulse.psi = v;
    } else if (axis == "N") {
        if (c.model.family != ModelFamily::MultiLevel)
            throw ConfigError("sweep over N requires model.family = multi_level");
        c.model.N = static_cast<int>(std::lround(v));
    } else {
        throw ConfigError("unknown sweep axis '" + axis +
                          "' (expected gamma, tau_over_delta, psi or N)");
    }
    c.validate();
    return c;
}

}  // namespace

SweepOutcome sweep(const RunConfig& cfg, const std::string& axis,
                   const std::vector<double>& values, std::vector<double> checkpoints,
                   int threads, const std::string& out_override) {
    if (values.empty()) throw ConfigError("sweep: empty value list");
    if (checkpoints.empty()) checkpoints.push_back(cfg.t_end);

    SweepOutcome outcome;
    for (std::size_t i = 0; i < values.size(); ++i) {
        RunConfig c = apply_axis(cfg, axis, values[i]);
        c.master_seed = mix_seed(cfg.master_seed, i);  // deterministic per-point seed
        c.output_label = cfg.output_label + "_" + axis + "_" + numg(values[i]);
        outcome.points.push_back(run_experiment(c, threads, out_override));
        outcome.quality_failed = outcome.quality_failed || outcome.points.back().quality_failed;
    }

    const std::filesystem::path dir =
        out_override.empty() ? std::filesystem::path(cfg.output_directory)
                             : std::filesystem::path(out_override);
    std::filesystem::create_directories(dir);
    const std::filesystem::path summary = dir / (cfg.output_label + "_sweep_" + axis + ".csv");
    std::ofstream os(summary);
    if (!os) throw std::runtime_error("cannot write " + summary.string());
    write_metadata(os, cfg);
    os << "# sweep axis: " << axis << "; per-point seed = mix_seed(master_seed, point index)\n";
    os << "# fidelity is reported at the output time nearest each checkpoint\n";
    os << axis;
    for (const double t : checkpoints) os << ",fidelity_at_" << numg(t) << ",stderr_at_" << numg(t);
    os << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const FidelityCurve& mc = outcome.points[i].ensemble.fidelity;
        os << num9(values[i]);
        for (const double t : checkpoints) {
            const std::size_t j = nearest_index(mc.grid, t);
            os << ',' << num9(mc.mean[j]) << ',' << num9(mc.stderr_[j]);
        }
        os << "\n";
    }
    outcome.summary_path = summary.string();
    return outcome;
}

namespace {

struct Reporter {
    std::ostream& os;
    bool all_ok = true;

    void line(bool ok, const std::string& name, const std::string& detail) {
        all_ok = all_ok && ok;
        os << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
    }
};

/// Empirical correlation statistics against the OU closed form.
void check_noise(Reporter& rep, const RunConfig& cfg, double noise_scale) {
    const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, 0.01);
    const std::size_t n_paths = 400;
    std::vector<NoisePath> paths;
    paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        paths.push_back(sample_path(cfg.corr, grid, mix_seed(20240, i), noise_scale));

    const std::size_t pairs[][2] = {{0, 0},   {40, 40},  {120, 120}, {80, 40},
                                    {160, 60}, {200, 120}, {30, 90},  {10, 180}};
    double worst = 0.0;
    bool ok = true;
    for (const auto& p : pairs) {
        const CorrelationEstimate est = estimate_correlation(paths, p[0], p[1]);
        const double target = cfg.corr.alpha(grid.t(p[0]), grid.t(p[1]));
        const double pull = std::abs(est.mean - target) / std::max(est.stderr_, 1e-300);
        worst = std::max(worst, pull);
        ok = ok && pull <= 5.0;
        const CorrelationEstimate pse = estimate_pseudo_correlation(paths, p[0], p[1]);
        const double pull2 = std::abs(pse.mean) / std::max(pse.stderr_, 1e-300);
        worst = std::max(worst, pull2);
        ok = ok && pull2 <= 5.0;
    }
    rep.line(ok, "noise correlation",
             "max pull " + numg(worst) + " standard errors over 8 (t,s) pairs (limit 5)");
}

/// Closed-form two-level transition amplitude against the trajectory stepper.
void check_amplitude(Reporter& rep, const RunConfig& cfg) {
    const double t_end = std::min(cfg.t_end, 5.0);
    const ModelSpec model =
        ModelSpec::two_level(cfg.model.family == ModelFamily::TwoLevel ? cfg.model.omega : 0.2);
    const Detuning det{model.omega, cfg.pulse};
    const TimeGrid grid = cfg.pulse.enabled ? aligned_grid(cfg.pulse, t_end, cfg.dt)
                                            : TimeGrid::uniform(0.0, t_end, cfg.dt);
    const TrajectoryContext ctx = TrajectoryContext::build(model, cfg.corr, det, grid);
    const std::vector<cplx> psi0 = model.default_initial_state();

    double worst = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        const NoisePath noise = sample_path(cfg.corr, ctx.half_grid, mix_seed(424242, i));
        const Trajectory traj = propagate_trajectory(ctx, noise, psi0);
        const ComplexSeries amp = two_level_amplitude(ctx, noise);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            cplx proj = 0.0;
            for (std::size_t j = 0; j < psi0.size(); ++j)
                proj += std::conj(psi0[j]) * traj.psi[k][j];
            worst = std::max(worst, std::abs(proj - amp.values[k]));
        }
    }
    rep.line(worst <= 1e-4, "pathwise amplitude",
             "max |projection - closed form| = " + numg(worst) + " over 10 paths (limit 1e-4)" +
                 (worst > 1e-4 ? "; run.dt is likely too coarse, reduce it (<= 2e-3)" : ""));
}

/// solve_p against the full-space projection, all three families. The P
/// stepper is second order, so the comparison runs at a fixed fine step
/// regardless of the configured dt.
void check_pq(Reporter& rep, const RunConfig& cfg) {
    const double t_end = std::min(cfg.t_end, 5.0);
    const double dt = std::min(cfg.dt, 5e-4);
    const ModelSpec models[] = {ModelSpec::two_level(0.2), ModelSpec::qutrit(1.0, std::sqrt(2.0)),
                                ModelSpec::multi_level(0.2, 5)};
    double worst = 0.0;
    for (const ModelSpec& model : models) {
        const Detuning det{model.omega, cfg.pulse};
        const TimeGrid grid = cfg.pulse.enabled ? aligned_grid(cfg.pulse, t_end, dt)
                                                : TimeGrid::uniform(0.0, t_end, dt);
        const TrajectoryContext ctx = TrajectoryContext::build(model, cfg.corr, det, grid);
        const NoisePath noise = sample_path(cfg.corr, ctx.half_grid, 515151);

        const auto dim = static_cast<std::size_t>(model.dimension());
        std::vector<cplx> psi0(dim);
        double nrm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            psi0[j] = 1.0 / static_cast<double>(j + 1);
            nrm += std::norm(psi0[j]);
        }
        for (cplx& a : psi0) a /= std::sqrt(nrm);

        const MatrixSeries heff = effective_hamiltonian_series(model, ctx.coeffs, noise, det);
        Eigen::VectorXcd p(dim);
        const std::vector<cplx> pvec = model.default_initial_state();
        for (std::size_t j = 0; j < dim; ++j) p(static_cast<Eigen::Index>(j)) = pvec[j];
        const PQBlocks blocks = partition(heff, p);

        Eigen::VectorXcd v0(dim);
        for (std::size_t j = 0; j < dim; ++j) v0(static_cast<Eigen::Index>(j)) = psi0[j];
        const Eigen::VectorXcd rot = blocks.rotation * v0;
        const ComplexSeries P = solve_p(blocks, rot(0), rot.tail(static_cast<Eigen::Index>(dim - 1)));

        const Trajectory traj = propagate_trajectory(ctx, noise, psi0);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            cplx proj = 0.0;
            for (std::size_t j = 0; j < dim; ++j)
                proj += std::conj(blocks.p_basis(static_cast<Eigen::Index>(j))) * traj.psi[k][j];
            worst = std::max(worst, std::abs(proj - P.values[k]));
        }
    }
    rep.line(worst <= 1e-4, "pq equivalence",
             "max |P(t) - <p|psi>| = " + numg(worst) + " across the three families (limit 1e-4)");
}

/// Closed-form evaluators: the N=1 curve equals the two-level curve.
void check_reduction(Reporter& rep, const RunConfig& cfg) {
    const double t_end = std::min(cfg.t_end, 5.0);
    const double omega = 0.37;
    const ModelSpec ml = ModelSpec::multi_level(omega, 1);
    // the multi-level gap is 2E, so the equivalent two-level detuning doubles
    PulseTrain doubled = cfg.pulse;
    doubled.psi *= 2.0;
    const ModelSpec tl = ModelSpec::two_level(2.0 * omega);
    const Detuning det_ml{ml.omega, cfg.pulse};
    const Detuning det_tl{tl.omega, doubled};
    const TimeGrid grid = cfg.pulse.enabled ? aligned_grid(cfg.pulse, t_end, cfg.dt)
                                            : TimeGrid::uniform(0.0, t_end, cfg.dt);
    const TimeGrid half = grid.with_midpoints();
    const CoeffSeries c_ml = solve_coefficients(ml, cfg.corr, det_ml, half);
    const CoeffSeries c_tl = solve_coefficients(tl, cfg.corr, det_tl, half);
    const FidelityCurve f_ml = fidelity_multilevel(
        AnalyticContext::build(ml, cfg.corr, det_ml, c_ml, cfg.analytic_coarsen));
    const FidelityCurve f_tl = fidelity_two_level(
        AnalyticContext::build(tl, cfg.corr, det_tl, c_tl, cfg.analytic_coarsen));
    double worst = 0.0;
    for (std::size_t k = 0; k < f_ml.grid.size(); ++k)
        worst = std::max(worst, std::abs(f_ml.mean[k] - f_tl.mean[k]));
    rep.line(worst <= 1e-10, "N=1 reduction",
             "max curve difference " + numg(worst) + " (limit 1e-10)");
}

/// Stepped time-ordered product against the commuting closed form.
void check_propagator(Reporter& rep, const RunConfig& cfg) {
    const double t_end = std::min(cfg.t_end, 5.0);
    const ModelSpec model = ModelSpec::multi_level(0.2, 5);
    const Detuning det{model.omega, cfg.pulse};
    const TimeGrid grid = cfg.pulse.enabled ? aligned_grid(cfg.pulse, t_end, cfg.dt)
                                            : TimeGrid::uniform(0.0, t_end, cfg.dt);
    const TrajectoryContext ctx = TrajectoryContext::build(model, cfg.corr, det, grid);
    NoisePath silent;
    silent.grid = ctx.half_grid;
    silent.samples.assign(ctx.half_grid.size(), 0.0);
    const MatrixSeries heff = effective_hamiltonian_series(model, ctx.coeffs, silent, det);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(model.dimension());
    e0(0) = 1.0;
    const PQBlocks blocks = partition(heff, e0);
    const std::vector<Eigen::MatrixXcd> stepped = propagator_columns(blocks);
    const std::vector<Eigen::MatrixXcd> closed =
        multilevel_propagator_closed(model.N, ctx.coeffs, det, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < stepped.size(); ++k)
        worst = std::max(worst, (stepped[k] - closed[k]).cwiseAbs().maxCoeff());
    rep.line(worst <= 1e-8, "propagator closed form",
             "max entry difference " + numg(worst) + " (limit 1e-8)");
}

}  // namespace

bool validate_run(const RunConfig& cfg, std::ostream& report, double noise_scale) {
    cfg.validate();
    Reporter rep{report};
    check_noise(rep, cfg, noise_scale);
    check_amplitude(rep, cfg);
    check_pq(rep, cfg);
    check_reduction(rep, cfg);
    check_propagator(rep, cfg);
    report << (rep.all_ok ? "validation passed\n" : "validation FAILED\n");
    return rep.all_ok;
}

}  // namespace pqsd
