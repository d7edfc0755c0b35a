#include "pqsd/qsd.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace pqsd {

TrajectoryContext TrajectoryContext::build(const ModelSpec& model, const CorrelationSpec& corr,
                                           const Detuning& detuning, const TimeGrid& grid) {
    model.validate();
    corr.validate();
    TrajectoryContext ctx;
    ctx.model = model;
    ctx.corr = corr;
    ctx.detuning = detuning;
    ctx.grid = grid;
    ctx.half_grid = grid.with_midpoints();
    ctx.coeffs = solve_coefficients(model, corr, detuning, ctx.half_grid);
    ctx.E_cell.resize(grid.size() - 1);
    ctx.int_E.resize(grid.size());
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        ctx.E_cell[k] = detuning.in_cell(grid.t(k), grid.t(k + 1));
    for (std::size_t k = 0; k < grid.size(); ++k) ctx.int_E[k] = detuning.integral(grid.t(k));
    ctx.phase_pattern.resize(model.dimension());
    model.hsys_diagonal(1.0, ctx.phase_pattern);
    return ctx;
}

cplx TrajectoryContext::rotating_overlap(std::span<const cplx> psi0, std::span<const cplx> psi,
                                         std::size_t k) const {
    const double IE = int_E[k];
    cplx acc = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j)
        acc += std::conj(psi0[j]) * std::polar(1.0, phase_pattern[j] * IE) * psi[j];
    return acc;
}

namespace {

double norm_sq(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return s;
}

/// Core RK4 loop. Calls observer(k, psi) at every full-grid point; returns
/// false if the norm guard tripped.
template <class Observer>
bool propagate_core(const TrajectoryContext& ctx, const NoisePath& noise,
                    std::span<const cplx> psi0, double guard, Observer&& observe) {
    const std::size_t n_cells = ctx.grid.size() - 1;
    if (noise.samples.size() != ctx.half_grid.size())
        throw std::invalid_argument("propagate: noise must be sampled on the half-step grid");
    const auto d = static_cast<std::size_t>(ctx.model.dimension());
    if (psi0.size() != d) throw std::invalid_argument("propagate: psi0 dimension mismatch");

    std::vector<cplx> y(psi0.begin(), psi0.end());
    std::vector<cplx> k1(d), k2(d), k3(d), k4(d), tmp(d);
    observe(0, std::span<const cplx>(y));

    const double guard_sq = guard * guard;
    for (std::size_t c = 0; c < n_cells; ++c) {
        const double h = ctx.grid.t(c + 1) - ctx.grid.t(c);
        const double E = ctx.E_cell[c];
        const std::size_t a = 2 * c;
        const CoeffState F0 = ctx.coeffs.at(a), Fm = ctx.coeffs.at(a + 1), F1 = ctx.coeffs.at(a + 2);
        const cplx z0 = noise.samples[a], zm = noise.samples[a + 1], z1 = noise.samples[a + 2];

        apply_minus_i_heff(ctx.model, F0, z0, E, y, k1);
        for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        apply_minus_i_heff(ctx.model, Fm, zm, E, tmp, k2);
        for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        apply_minus_i_heff(ctx.model, Fm, zm, E, tmp, k3);
        for (std::size_t j = 0; j < d; ++j) tmp[j] = y[j] + h * k3[j];
        apply_minus_i_heff(ctx.model, F1, z1, E, tmp, k4);
        for (std::size_t j = 0; j < d; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        const double nrm = norm_sq(y);
        if (!(nrm < guard_sq) || !std::isfinite(nrm)) return false;
        observe(c + 1, std::span<const cplx>(y));
    }
    return true;
}

}  // namespace

Trajectory propagate_trajectory(const TrajectoryContext& ctx, const NoisePath& noise_half,
                                std::span<const cplx> psi0, double guard) {
    Trajectory traj;
    traj.grid = ctx.grid;
    traj.seed = noise_half.seed;
    traj.psi.resize(ctx.grid.size());
    traj.divergent = !propagate_core(ctx, noise_half, psi0, guard,
                                     [&](std::size_t k, std::span<const cplx> psi) {
                                         traj.psi[k].assign(psi.begin(), psi.end());
                                     });
    return traj;
}

ComplexSeries two_level_amplitude(const TrajectoryContext& ctx, const NoisePath& noise_half) {
    if (ctx.model.family != ModelFamily::TwoLevel)
        throw std::invalid_argument("two_level_amplitude: two-level model required");
    const TimeGrid& half = ctx.half_grid;
    const std::size_t nh = half.size();
    if (noise_half.samples.size() != nh)
        throw std::invalid_argument("two_level_amplitude: noise must live on the half-step grid");

    // Int F on the half grid (trapezoid; F is smooth), Int E exact.
    std::vector<cplx> F_half(nh);
    for (std::size_t k = 0; k < nh; ++k) F_half[k] = ctx.coeffs.values[k][0];
    const std::vector<cplx> intF = cumulative_trapezoid(half, F_half);

    // integrand of the noise term: z*_s exp(-i Int(E1'-E0)) with E1'-E0 = E - iF
    std::vector<cplx> g(nh);
    for (std::size_t k = 0; k < nh; ++k) {
        const double IE = ctx.detuning.integral(half.t(k));
        g[k] = noise_half.samples[k] * std::exp(cplx(0.0, -IE) - intF[k]);
    }
    const std::vector<cplx> J = cumulative_simpson_half(ctx.grid, g);

    ComplexSeries amp;
    amp.grid = ctx.grid;
    amp.values.resize(ctx.grid.size());
    for (std::size_t k = 0; k < ctx.grid.size(); ++k) {
        const double IE = ctx.int_E[k];
        const cplx intF_k = intF[2 * k];
        const cplx term1 = std::exp(cplx(0.0, -0.5 * IE) - intF_k);  // e^{-i Int E1'}
        const cplx term0 = std::exp(cplx(0.0, 0.5 * IE));            // e^{-i Int E0}
        amp.values[k] = 0.5 * (term1 + term0 * (1.0 + J[k]));
    }
    return amp;
}

EnsembleResult ensemble_fidelity(const TrajectoryContext& ctx, const EnsembleOptions& opts) {
    if (opts.n_traj < 2) throw std::invalid_argument("ensemble_fidelity: n_traj must be >= 2");
    std::vector<cplx> psi0 = opts.initial_state.empty() ? ctx.model.default_initial_state()
                                                        : opts.initial_state;
    if (psi0.size() != static_cast<std::size_t>(ctx.model.dimension()))
        throw std::invalid_argument("ensemble_fidelity: initial state dimension mismatch");
    {
        const double n = std::sqrt(norm_sq(psi0));
        if (!(n > 0)) throw std::invalid_argument("ensemble_fidelity: zero initial state");
        for (cplx& a : psi0) a /= n;
    }

    std::size_t stride = opts.output_stride;
    if (stride == 0) stride = std::max<std::size_t>(1, (ctx.grid.size() - 1) / 400);
    std::vector<std::size_t> out_idx;
    const TimeGrid out_grid = ctx.grid.subsample(stride, &out_idx);
    const std::size_t n_out = out_idx.size();

    // Per-trajectory rows, reduced in index order afterwards, so the result
    // does not depend on the thread count.
    const auto n_traj = static_cast<std::size_t>(opts.n_traj);
    std::vector<double> fid_rows(n_traj * n_out), norm_rows(n_traj * n_out);
    std::vector<char> diverged(n_traj, 0);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::vector<char> at_out(ctx.grid.size(), 0);
        std::vector<std::size_t> out_pos(ctx.grid.size(), 0);
        for (std::size_t j = 0; j < n_out; ++j) {
            at_out[out_idx[j]] = 1;
            out_pos[out_idx[j]] = j;
        }
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_traj) break;
            const NoisePath noise =
                sample_path(ctx.corr, ctx.half_grid, mix_seed(opts.master_seed, i));
            double* frow = fid_rows.data() + i * n_out;
            double* nrow = norm_rows.data() + i * n_out;
            const bool ok = propagate_core(
                ctx, noise, psi0, opts.divergence_guard,
                [&](std::size_t k, std::span<const cplx> psi) {
                    if (!at_out[k]) return;
                    const std::size_t j = out_pos[k];
                    frow[j] = std::norm(ctx.rotating_overlap(psi0, psi, k));
                    nrow[j] = norm_sq(psi);
                });
            if (!ok) diverged[i] = 1;
        }
    };

    const int n_threads = std::max(1, opts.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EnsembleResult res;
    res.output_indices = out_idx;
    res.fidelity.grid = out_grid;
    res.norm_sq.grid = out_grid;
    res.fidelity.mean.assign(n_out, 0.0);
    res.fidelity.stderr_.assign(n_out, 0.0);
    res.norm_sq.mean.assign(n_out, 0.0);
    res.norm_sq.stderr_.assign(n_out, 0.0);

    long kept = 0;
    for (std::size_t i = 0; i < n_traj; ++i)
        if (!diverged[i]) ++kept;
    res.divergent_count = static_cast<long>(n_traj) - kept;
    res.failed = static_cast<double>(res.divergent_count) >
                 opts.divergent_fraction_limit * static_cast<double>(n_traj);
    res.fidelity.n_traj = kept;
    res.norm_sq.n_traj = kept;
    if (kept == 0) return res;

    std::vector<double> fsum(n_out, 0.0), fsq(n_out, 0.0), nsum(n_out, 0.0), nsq(n_out, 0.0);
    for (std::size_t i = 0; i < n_traj; ++i) {
        if (diverged[i]) continue;
        const double* frow = fid_rows.data() + i * n_out;
        const double* nrow = norm_rows.data() + i * n_out;
        for (std::size_t j = 0; j < n_out; ++j) {
            fsum[j] += frow[j];
            fsq[j] += frow[j] * frow[j];
            nsum[j] += nrow[j];
            nsq[j] += nrow[j] * nrow[j];
        }
    }
    const auto nk = static_cast<double>(kept);
    for (std::size_t j = 0; j < n_out; ++j) {
        res.fidelity.mean[j] = fsum[j] / nk;
        res.norm_sq.mean[j] = nsum[j] / nk;
        const double fvar = std::max(0.0, fsq[j] / nk - res.fidelity.mean[j] * res.fidelity.mean[j]);
        const double nvar = std::max(0.0, nsq[j] / nk - res.norm_sq.mean[j] * res.norm_sq.mean[j]);
        res.fidelity.stderr_[j] = std::sqrt(fvar / nk);
        res.norm_sq.stderr_[j] = std::sqrt(nvar / nk);
    }
    return res;
}

}  // namespace pqsd
