#pragma once

#include <Eigen/Dense>

#include "pqsd/control.hpp"
#include "pqsd/noise.hpp"
#include "pqsd/numerics.hpp"

namespace pqsd {

enum class ModelFamily { TwoLevel, Qutrit, MultiLevel };

/// One of the three model families. Basis ordering is fixed per family:
///   TwoLevel   (|0>, |1>)
///   Qutrit     (|1>, |0>, |2>)
///   MultiLevel (|0>, |1>, ..., |N>)
struct ModelSpec {
    ModelFamily family = ModelFamily::TwoLevel;
    double omega = 0.0;   ///< bare frequency, units Gamma
    double kappa = 1.0;   ///< coupling scale (Qutrit only)
    int N = 1;            ///< number of excited levels (MultiLevel only)

    static ModelSpec two_level(double omega);
    static ModelSpec qutrit(double omega, double kappa);
    static ModelSpec multi_level(double omega, int N);

    int dimension() const;
    void validate() const;
    /// Canonical initial state of the family: the uniform superposition.
    std::vector<cplx> default_initial_state() const;
    /// Diagonal of H_sys at detuning E (all families have diagonal H_sys).
    void hsys_diagonal(double E, std::span<double> out) const;
};

/// Obar-operator coefficients: (F) for TwoLevel/MultiLevel, (F1, F2) for
/// Qutrit. Initial condition is zero.
struct CoeffState {
    cplx f[2] = {0.0, 0.0};
    int count = 1;
};

/// Right-hand side of the coefficient Riccati ODEs at detuning E.
CoeffState coeff_rhs(const ModelSpec& model, const CorrelationSpec& corr, const CoeffState& state,
                     double E);

/// Noise-independent coefficient series, integrated once per run with RK4 on
/// the half-step grid and cached; trajectories reuse it.
struct CoeffSeries {
    TimeGrid half_grid;
    std::vector<std::array<cplx, 2>> values;  ///< one CoeffState per half-grid point
    int count = 1;

    CoeffState at(std::size_t k) const {
        CoeffState s;
        s.f[0] = values[k][0];
        s.f[1] = values[k][1];
        s.count = count;
        return s;
    }
};

CoeffSeries solve_coefficients(const ModelSpec& model, const CorrelationSpec& corr,
                               const Detuning& detuning, const TimeGrid& half_grid);

/// Dense matrix of H_eff in the family's fixed basis.
Eigen::MatrixXcd effective_hamiltonian(const ModelSpec& model, const CoeffState& state, cplx z_star,
                                       double E);

/// dpsi = -i H_eff psi without forming the matrix; the hot path of the
/// trajectory stepper. psi and out must not alias.
void apply_minus_i_heff(const ModelSpec& model, const CoeffState& state, cplx z_star, double E,
                        std::span<const cplx> psi, std::span<cplx> out);

/// H_eff samples on a grid for a fixed noise path (for PQ partitioning).
/// E is sampled by pulse_value at each grid time.
struct MatrixSeries {
    TimeGrid grid;
    std::vector<Eigen::MatrixXcd> values;
};

MatrixSeries effective_hamiltonian_series(const ModelSpec& model, const CoeffSeries& coeffs,
                                          const NoisePath& noise_half, const Detuning& detuning);

}  // namespace pqsd
