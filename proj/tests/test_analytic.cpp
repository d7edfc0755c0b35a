#include <cmath>
#include <random>

#include "doctest.h"
#include "pqsd/analytic.hpp"

using namespace pqsd;

namespace {

AnalyticContext make_ctx(const ModelSpec& model, const CorrelationSpec& corr, double t_end,
                         double dt, PulseTrain pulse = {}, std::size_t coarsen = 4) {
    const Detuning det{model.omega, pulse};
    const TimeGrid grid = pulse.enabled ? aligned_grid(pulse, t_end, dt)
                                        : TimeGrid::uniform(0.0, t_end, dt);
    const TimeGrid half = grid.with_midpoints();
    const CoeffSeries coeffs = solve_coefficients(model, corr, det, half);
    return AnalyticContext::build(model, corr, det, coeffs, coarsen);
}

double direct_double_sum_real(const TimeGrid& g, std::size_t k,
                              const std::function<cplx(std::size_t, std::size_t)>& f) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = 0; j <= k; ++j)
            acc += trapezoid_weight(g, i, k) * trapezoid_weight(g, j, k) * f(i, j);
    return acc.real();
}

}  // namespace

TEST_CASE("every evaluator starts at fidelity 1") {
    const CorrelationSpec corr{1.0, 0.5};
    const AnalyticContext tl = make_ctx(ModelSpec::two_level(0.2), corr, 2.0, 1e-2);
    const AnalyticContext qt = make_ctx(ModelSpec::qutrit(1.0, std::sqrt(2.0)), corr, 2.0, 1e-2);
    const AnalyticContext ml = make_ctx(ModelSpec::multi_level(0.2, 6), corr, 2.0, 1e-2);
    CHECK(fidelity_two_level(tl).mean.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_qutrit(qt).mean.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_multilevel(ml).mean.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_weak_coupling(ml, 6).mean.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("growing double integrals match the direct quadratic sums") {
    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    const TimeGrid grid = TimeGrid::with_breakpoints(0.0, 1.0, 0.11, {0.305, 0.62});
    const std::size_t n = grid.size();

    SUBCASE("hermitian") {
        std::vector<cplx> base(n);
        for (auto& z : base) z = cplx(g(rng), g(rng));
        auto f = [&](std::size_t i, std::size_t j) { return base[i] * std::conj(base[j]); };
        const std::vector<double> curve = growing_hermitian_double_integral(grid, f);
        REQUIRE(curve.size() == n);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(curve[k] == doctest::Approx(direct_double_sum_real(grid, k, f)).epsilon(1e-12));
    }
    SUBCASE("general") {
        std::vector<cplx> u(n), v(n);
        for (auto& z : u) z = cplx(g(rng), g(rng));
        for (auto& z : v) z = cplx(g(rng), g(rng));
        auto f = [&](std::size_t i, std::size_t j) { return u[i] * v[j] + 0.3 * u[j]; };
        const std::vector<cplx> curve = growing_double_integral(grid, f);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i <= k; ++i)
                for (std::size_t j = 0; j <= k; ++j)
                    acc += trapezoid_weight(grid, i, k) * trapezoid_weight(grid, j, k) * f(i, j);
            CHECK(std::abs(curve[k] - acc) < 1e-12);
        }
    }
}

TEST_CASE("fast quadruple-integral path equals the brute-force evaluation") {
    const CorrelationSpec corr{1.0, 0.5};
    // coarse grid so the O(M^4) oracle stays cheap
    const AnalyticContext ctx =
        make_ctx(ModelSpec::qutrit(1.0, std::sqrt(2.0)), corr, 3.0, 0.05, {}, 1);
    REQUIRE(ctx.grid.size() <= 200);
    const std::vector<double> fast = qutrit_quadruple_curve(ctx);
    const double brute = qutrit_quadruple_brute(ctx);
    const double scale = std::max(1.0, std::abs(brute));
    CHECK(std::abs(fast.back() - brute) / scale < 1e-6);
}

TEST_CASE("the N = 1 multi-level curve is the two-level curve at doubled detuning") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double omega = 0.1 + U(rng);
        const CorrelationSpec corr{0.5 + U(rng), 0.2 + 2.0 * U(rng)};
        PulseTrain pulse;
        if (trial % 2 == 1) pulse = PulseTrain{0.5, 0.1, 0.5 + U(rng), true};
        PulseTrain doubled = pulse;
        doubled.psi *= 2.0;

        const AnalyticContext ml =
            make_ctx(ModelSpec::multi_level(omega, 1), corr, 3.0, 1e-3, pulse);
        const Detuning det_tl{2.0 * omega, doubled};
        const TimeGrid grid = pulse.enabled ? aligned_grid(pulse, 3.0, 1e-3)
                                            : TimeGrid::uniform(0.0, 3.0, 1e-3);
        const ModelSpec tl_model = ModelSpec::two_level(2.0 * omega);
        const CoeffSeries c_tl = solve_coefficients(tl_model, corr, det_tl, grid.with_midpoints());
        const AnalyticContext tl = AnalyticContext::build(tl_model, corr, det_tl, c_tl);

        const FidelityCurve a = fidelity_multilevel(ml);
        const FidelityCurve b = fidelity_two_level(tl);
        REQUIRE(a.grid.size() == b.grid.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < a.mean.size(); ++k)
            worst = std::max(worst, std::abs(a.mean[k] - b.mean[k]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("zero system-bath coupling leaves the fidelity at 1") {
    const CorrelationSpec off{0.0, 0.5};
    const AnalyticContext tl = make_ctx(ModelSpec::two_level(0.2), off, 4.0, 1e-2);
    const AnalyticContext ml = make_ctx(ModelSpec::multi_level(0.2, 4), off, 4.0, 1e-2);
    for (const double v : fidelity_two_level(tl).mean) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (const double v : fidelity_multilevel(ml).mean)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (const double v : fidelity_weak_coupling(ml, 4).mean)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curves converge under grid refinement") {
    const CorrelationSpec corr{1.0, 0.5};
    auto final_value = [&](double dt) {
        const AnalyticContext ctx = make_ctx(ModelSpec::two_level(0.2), corr, 5.0, dt);
        return fidelity_two_level(ctx).mean.back();
    };
    CHECK(std::abs(final_value(4e-3) - final_value(2e-3)) < 1e-4);
}

TEST_CASE("fidelities stay inside [0, 1] up to discretization slack") {
    const CorrelationSpec corr{1.0, 2.0};
    const PulseTrain pulse{0.2, 0.04, 2.0, true};
    const AnalyticContext tl = make_ctx(ModelSpec::two_level(0.2), corr, 6.0, 1e-3, pulse);
    const AnalyticContext qt =
        make_ctx(ModelSpec::qutrit(1.0, std::sqrt(2.0)), corr, 6.0, 1e-3, pulse);
    const AnalyticContext ml = make_ctx(ModelSpec::multi_level(0.2, 8), corr, 6.0, 1e-3, pulse);
    // exact evaluators stay inside [0, 1]
    for (const FidelityCurve& c : {fidelity_two_level(tl), fidelity_multilevel(ml)}) {
        for (const double v : c.mean) {
            CHECK(v >= -1e-3);
            CHECK(v <= 1.0 + 1e-3);
        }
        CHECK(c.n_traj == 0);
    }
    // the qutrit noise-free approximation and the weak-coupling limit are
    // approximations of the dynamics, so only mild overshoot is allowed
    for (const FidelityCurve& c : {fidelity_qutrit(qt), fidelity_weak_coupling(ml, 8)}) {
        for (const double v : c.mean) {
            CHECK(v >= -1e-3);
            CHECK(v <= 1.25);
        }
    }
}

TEST_CASE("free two-level decay approaches the 1/2 plateau") {
    const CorrelationSpec corr{1.0, 2.0};
    const AnalyticContext ctx = make_ctx(ModelSpec::two_level(0.2), corr, 20.0, 2e-3);
    const FidelityCurve c = fidelity_two_level(ctx);
    CHECK(std::abs(c.mean.back() - 0.5) < 0.05);
}
