#pragma once

#include "pqsd/qsd.hpp"

namespace pqsd {

/// Inputs of the closed-form fidelity evaluators, resampled onto a coarsened
/// analytic grid (every `coarsen`-th integration point, final point kept).
/// The phase integral of E stays exact; F is taken from the cached series.
struct AnalyticContext {
    ModelSpec model;
    CorrelationSpec corr;
    TimeGrid grid;
    std::vector<double> int_E;                ///< exact integral of E per point
    std::vector<std::array<cplx, 2>> F;       ///< coefficient samples per point

    static AnalyticContext build(const ModelSpec& model, const CorrelationSpec& corr,
                                 const Detuning& detuning, const CoeffSeries& coeffs,
                                 std::size_t coarsen = 4);
};

/// The barred (cumulative-integral) quantities entering the closed forms.
/// All series equal 1 at t = 0.
struct BarredCoefficients {
    std::vector<double> Fbar_R;   ///< exp(-Int Re F)
    std::vector<double> Fbar_I;   ///< cos(Int Im F)
    std::vector<double> int_F_I;  ///< Int Im F
    std::vector<cplx> Ebar;       ///< exp(-i Int E)
    std::vector<cplx> Kbar;       ///< exp(+i Int (E + Im F))
    // qutrit
    std::vector<cplx> Fbar_1, Fbar_2, Bbar;  ///< Bbar = Ebar * Fbar_2 / Fbar_1
};

BarredCoefficients barred_coefficients(const AnalyticContext& ctx);

/// curve[k] = sum_{i,j<=k} w_i w_j f(i,j) with trapezoid weights w on
/// [t_0, t_k], updated incrementally (O(M) per step, O(M^2) total).
/// f must be Hermitian: f(j,i) = conj(f(i,j)).
std::vector<double> growing_hermitian_double_integral(
    const TimeGrid& grid, const std::function<cplx(std::size_t, std::size_t)>& f);

/// Same without the Hermitian requirement.
std::vector<cplx> growing_double_integral(const TimeGrid& grid,
                                          const std::function<cplx(std::size_t, std::size_t)>& f);

/// Two-level closed-form fidelity (exact, rotating picture of H_sys):
/// F = 1/4 [1 + Fbar_R^2 + 2 Fbar_R Fbar_I + II alpha(s1,s2) Fbar_R Fbar_R Kbar/Kbar].
FidelityCurve fidelity_two_level(const AnalyticContext& ctx);

/// Qutrit closed-form fidelity under the noise-free approximation:
/// deterministic term |1 + Fbar_1 + Fbar_2|^2, a noise-linear double
/// integral, and a noise-quadratic quadruple integral evaluated by the
/// OU-separable fast path (nested cumulative 1-D integrals, O(M^2) total).
FidelityCurve fidelity_qutrit(const AnalyticContext& ctx);

/// (N+1)-level closed-form fidelity.
FidelityCurve fidelity_multilevel(const AnalyticContext& ctx);

/// Weak-coupling limit (F -> 0) of the multi-level fidelity.
FidelityCurve fidelity_weak_coupling(const AnalyticContext& ctx, int N);

/// Quadruple-integral term of the qutrit formula (without the kappa^4
/// prefactor), separable fast path: curve over the whole grid.
std::vector<double> qutrit_quadruple_curve(const AnalyticContext& ctx);

/// Brute-force O(M^4) evaluation of the same term at the final grid time.
/// Internal oracle; identical discretization, so agreement is to roundoff.
double qutrit_quadruple_brute(const AnalyticContext& ctx);

}  // namespace pqsd
