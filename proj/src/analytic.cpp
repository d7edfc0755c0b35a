#include "pqsd/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pqsd {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

AnalyticContext AnalyticContext::build(const ModelSpec& model, const CorrelationSpec& corr,
                                       const Detuning& detuning, const CoeffSeries& coeffs,
                                       std::size_t coarsen) {
    model.validate();
    corr.validate();
    if (coarsen == 0) throw std::invalid_argument("AnalyticContext: coarsen must be >= 1");
    const TimeGrid full = coeffs.half_grid.subsample(2);
    std::vector<std::size_t> kept;
    AnalyticContext ctx;
    ctx.model = model;
    ctx.corr = corr;
    ctx.grid = full.subsample(coarsen, &kept);
    const std::size_t n = kept.size();
    ctx.int_E.resize(n);
    ctx.F.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        ctx.int_E[j] = detuning.integral(ctx.grid.t(j));
        ctx.F[j] = coeffs.values[2 * kept[j]];
    }
    return ctx;
}

BarredCoefficients barred_coefficients(const AnalyticContext& ctx) {
    const std::size_t n = ctx.grid.size();
    std::vector<cplx> f0(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = ctx.F[i][0];
        f1[i] = ctx.F[i][1];
    }
    const std::vector<cplx> intF0 = cumulative_trapezoid(ctx.grid, f0);

    BarredCoefficients bc;
    bc.Fbar_R.resize(n);
    bc.Fbar_I.resize(n);
    bc.int_F_I.resize(n);
    bc.Ebar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        bc.Fbar_R[i] = std::exp(-intF0[i].real());
        bc.int_F_I[i] = intF0[i].imag();
        bc.Fbar_I[i] = std::cos(bc.int_F_I[i]);
        bc.Ebar[i] = std::exp(-kI * ctx.int_E[i]);
    }
    switch (ctx.model.family) {
        case ModelFamily::TwoLevel: {
            bc.Kbar.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                bc.Kbar[i] = std::polar(1.0, ctx.int_E[i] + bc.int_F_I[i]);
            break;
        }
        case ModelFamily::MultiLevel: {
            bc.Kbar.resize(n);
            const auto N = static_cast<double>(ctx.model.N);
            for (std::size_t i = 0; i < n; ++i)
                bc.Kbar[i] = std::polar(1.0, 2.0 * ctx.int_E[i] + N * bc.int_F_I[i]);
            break;
        }
        case ModelFamily::Qutrit: {
            const std::vector<cplx> intF1 = cumulative_trapezoid(ctx.grid, f1);
            bc.Fbar_1.resize(n);
            bc.Fbar_2.resize(n);
            bc.Bbar.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                bc.Fbar_1[i] = std::exp(-intF0[i]);
                bc.Fbar_2[i] = std::exp(-intF1[i]);
                bc.Bbar[i] = bc.Ebar[i] * bc.Fbar_2[i] / bc.Fbar_1[i];
            }
            break;
        }
    }
    return bc;
}

std::vector<double> growing_hermitian_double_integral(
    const TimeGrid& grid, const std::function<cplx(std::size_t, std::size_t)>& f) {
    const std::size_t n = grid.size();
    std::vector<double> out(n, 0.0);
    std::vector<double> w(n, 0.0);
    double T = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        // node k-1 changes weight as the domain grows to [t_0, t_k]
        const double d = trapezoid_weight(grid, k - 1, k) - w[k - 1];
        cplx row = 0.0;
        for (std::size_t j = 0; j + 1 < k; ++j) row += w[j] * f(k - 1, j);
        T += 2.0 * d * row.real() + (2.0 * w[k - 1] * d + d * d) * f(k - 1, k - 1).real();
        w[k - 1] += d;
        // node k enters
        const double wk = trapezoid_weight(grid, k, k);
        row = 0.0;
        for (std::size_t j = 0; j < k; ++j) row += w[j] * f(k, j);
        T += 2.0 * wk * row.real() + wk * wk * f(k, k).real();
        w[k] = wk;
        out[k] = T;
    }
    return out;
}

std::vector<cplx> growing_double_integral(const TimeGrid& grid,
                                          const std::function<cplx(std::size_t, std::size_t)>& f) {
    const std::size_t n = grid.size();
    std::vector<cplx> out(n, cplx(0.0));
    std::vector<double> w(n, 0.0);
    cplx T = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double d = trapezoid_weight(grid, k - 1, k) - w[k - 1];
        cplx acc = 0.0;
        for (std::size_t j = 0; j + 1 < k; ++j) acc += w[j] * (f(k - 1, j) + f(j, k - 1));
        T += d * acc + (2.0 * w[k - 1] * d + d * d) * f(k - 1, k - 1);
        w[k - 1] += d;
        const double wk = trapezoid_weight(grid, k, k);
        acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += w[j] * (f(k, j) + f(j, k));
        T += wk * acc + wk * wk * f(k, k);
        w[k] = wk;
        out[k] = T;
    }
    return out;
}

namespace {

/// II alpha(s1,s2) conj(g(s1)) g(s2) over the growing square (real, PSD form).
std::vector<double> alpha_quadratic(const AnalyticContext& ctx, std::span<const cplx> g) {
    const TimeGrid& grid = ctx.grid;
    auto f = [&](std::size_t i, std::size_t j) {
        return ctx.corr.alpha(grid.t(i), grid.t(j)) * std::conj(g[i]) * g[j];
    };
    return growing_hermitian_double_integral(grid, f);
}

FidelityCurve exact_curve(const TimeGrid& grid) {
    FidelityCurve out;
    out.grid = grid;
    out.mean.resize(grid.size());
    out.stderr_.assign(grid.size(), 0.0);
    out.n_traj = 0;
    return out;
}

}  // namespace

FidelityCurve fidelity_two_level(const AnalyticContext& ctx) {
    if (ctx.model.family != ModelFamily::TwoLevel)
        throw std::invalid_argument("fidelity_two_level: two-level model required");
    const BarredCoefficients bc = barred_coefficients(ctx);
    const std::size_t n = ctx.grid.size();
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = bc.Fbar_R[i] * bc.Kbar[i];
    const std::vector<double> I = alpha_quadratic(ctx, g);
    FidelityCurve out = exact_curve(ctx.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double FR = bc.Fbar_R[i];
        out.mean[i] = 0.25 * (1.0 + FR * FR + 2.0 * FR * bc.Fbar_I[i] + I[i]);
    }
    return out;
}

FidelityCurve fidelity_multilevel(const AnalyticContext& ctx) {
    if (ctx.model.family != ModelFamily::MultiLevel)
        throw std::invalid_argument("fidelity_multilevel: multi-level model required");
    const BarredCoefficients bc = barred_coefficients(ctx);
    const std::size_t n = ctx.grid.size();
    const int N = ctx.model.N;
    const auto dN = static_cast<double>(N);
    std::vector<cplx> g(n);
    std::vector<double> FRN(n);
    for (std::size_t i = 0; i < n; ++i) {
        FRN[i] = std::pow(bc.Fbar_R[i], N);
        g[i] = FRN[i] * bc.Kbar[i];
    }
    const std::vector<double> I = alpha_quadratic(ctx, g);
    FidelityCurve out = exact_curve(ctx.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double FpI = std::cos(dN * bc.int_F_I[i]);
        out.mean[i] = (1.0 + dN * dN * FRN[i] * FRN[i] + 2.0 * dN * FRN[i] * FpI +
                       dN * dN * I[i]) /
                      ((dN + 1.0) * (dN + 1.0));
    }
    return out;
}

FidelityCurve fidelity_weak_coupling(const AnalyticContext& ctx, int N) {
    if (N < 1) throw std::invalid_argument("fidelity_weak_coupling: N >= 1");
    const std::size_t n = ctx.grid.size();
    const auto dN = static_cast<double>(N);
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::polar(1.0, 2.0 * ctx.int_E[i]);
    const std::vector<double> I = alpha_quadratic(ctx, g);
    FidelityCurve out = exact_curve(ctx.grid);
    for (std::size_t i = 0; i < n; ++i)
        out.mean[i] =
            (1.0 + dN * dN + 2.0 * dN + dN * dN * I[i]) / ((dN + 1.0) * (dN + 1.0));
    return out;
}

namespace {

/// Amplitude series of the qutrit noise terms: c(s) multiplies the outer
/// noise factor, d(s) the inner (time-ordered) one.
struct QutritSeries {
    BarredCoefficients bc;
    std::vector<cplx> c;  ///< Ebar * Fbar_1
    std::vector<cplx> d;  ///< Bbar
};

QutritSeries qutrit_series(const AnalyticContext& ctx) {
    if (ctx.model.family != ModelFamily::Qutrit)
        throw std::invalid_argument("qutrit evaluator: qutrit model required");
    QutritSeries q;
    q.bc = barred_coefficients(ctx);
    const std::size_t n = ctx.grid.size();
    q.c.resize(n);
    q.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        q.c[i] = q.bc.Ebar[i] * q.bc.Fbar_1[i];
        q.d[i] = q.bc.Bbar[i];
    }
    return q;
}

}  // namespace

std::vector<double> qutrit_quadruple_curve(const AnalyticContext& ctx) {
    const QutritSeries q = qutrit_series(ctx);
    const TimeGrid& grid = ctx.grid;
    const std::size_t n = grid.size();
    const double gam = ctx.corr.gamma;
    const double c0 = ctx.corr.variance();  // Gamma*gamma/2

    // exp(-gamma|x-y|) = exp(-gamma x) exp(+gamma y) for y <= x turns every
    // inner time-ordered integral into cumulative 1-D integrals, so each
    // kernel entry below costs O(1).
    std::vector<double> em(n), ep(n);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) {
        em[i] = std::exp(-gam * grid.t(i));
        ep[i] = std::exp(gam * grid.t(i));
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = std::conj(q.d[i]) * ep[i];
    const std::vector<cplx> dbar_p = cumulative_trapezoid(grid, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = std::conj(q.d[i]) * em[i];
    const std::vector<cplx> dbar_m = cumulative_trapezoid(grid, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = q.d[i] * ep[i];
    const std::vector<cplx> d_p = cumulative_trapezoid(grid, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = q.d[i] * em[i];
    const std::vector<cplx> d_m = cumulative_trapezoid(grid, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = std::conj(q.d[i]) * em[i] * d_p[i];
    const std::vector<cplx> e1 = cumulative_trapezoid(grid, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = std::conj(q.d[i]) * ep[i] * d_m[i];
    const std::vector<cplx> e3 = cumulative_trapezoid(grid, tmp);

    // u(a,b) = Int_0^{s_b} conj(d)(x) alpha(x, s_a) dx
    auto u = [&](std::size_t a, std::size_t b) -> cplx {
        if (b <= a) return c0 * em[a] * dbar_p[b];
        return c0 * (em[a] * dbar_p[a] + ep[a] * (dbar_m[b] - dbar_m[a]));
    };
    // W(i,k) = Int_0^{s_k} dy conj(d)(y) Int_0^{s_i} dx d(x) alpha(y, x)
    auto W = [&](std::size_t i, std::size_t k) -> cplx {
        const std::size_t m = std::min(i, k);
        cplx w = c0 * (e1[m] + d_m[i] * dbar_p[m] - e3[m]);
        if (k > i) w += c0 * d_p[i] * (dbar_m[k] - dbar_m[i]);
        return w;
    };
    auto f = [&](std::size_t i, std::size_t k) -> cplx {
        return q.c[i] * std::conj(q.c[k]) *
               (ctx.corr.alpha(grid.t(i), grid.t(k)) * W(i, k) +
                u(i, k) * std::conj(u(k, i)));
    };
    return growing_hermitian_double_integral(grid, f);
}

double qutrit_quadruple_brute(const AnalyticContext& ctx) {
    const QutritSeries q = qutrit_series(ctx);
    const TimeGrid& grid = ctx.grid;
    const std::size_t n = grid.size();
    if (n > 200)
        throw std::invalid_argument("qutrit_quadruple_brute: grid too large for O(M^4)");
    const std::size_t K = n - 1;

    std::vector<double> A(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i * n + j] = ctx.corr.alpha(grid.t(i), grid.t(j));
    std::vector<double> wo(n);
    for (std::size_t i = 0; i < n; ++i) wo[i] = trapezoid_weight(grid, i, K);

    double T = 0.0;
    for (std::size_t i = 0; i <= K; ++i)
        for (std::size_t k = 0; k <= K; ++k) {
            const cplx pref = wo[i] * wo[k] * q.c[i] * std::conj(q.c[k]);
            cplx acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                const double wj = trapezoid_weight(grid, j, i);
                for (std::size_t l = 0; l <= k; ++l) {
                    const double wl = trapezoid_weight(grid, l, k);
                    const double kern = A[k * n + i] * A[l * n + j] + A[k * n + j] * A[l * n + i];
                    acc += (wj * wl * kern) * (q.d[j] * std::conj(q.d[l]));
                }
            }
            T += (pref * acc).real();
        }
    return T;
}

FidelityCurve fidelity_qutrit(const AnalyticContext& ctx) {
    const QutritSeries q = qutrit_series(ctx);
    const TimeGrid& grid = ctx.grid;
    const std::size_t n = grid.size();

    const std::vector<double> J1 = alpha_quadratic(ctx, q.d);
    const std::vector<double> J3 = alpha_quadratic(ctx, q.c);
    auto f2 = [&](std::size_t i, std::size_t j) {
        return ctx.corr.alpha(grid.t(i), grid.t(j)) * std::conj(q.d[i]) * q.c[j];
    };
    const std::vector<cplx> J2 = growing_double_integral(grid, f2);
    const std::vector<double> T4 = qutrit_quadruple_curve(ctx);

    const double k2 = ctx.model.kappa * ctx.model.kappa;
    FidelityCurve out = exact_curve(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx F1t = q.bc.Fbar_1[i];
        const double term1 = std::norm(1.0 + F1t + q.bc.Fbar_2[i]);
        const double term2 =
            std::norm(F1t) * J1[i] + 2.0 * (std::conj(F1t) * J2[i]).real() + J3[i];
        out.mean[i] = (term1 + k2 * term2 + k2 * k2 * T4[i]) / 9.0;
    }
    return out;
}

}  // namespace pqsd
