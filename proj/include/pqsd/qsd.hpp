#pragma once

#include <cstdint>

#include "pqsd/models.hpp"

namespace pqsd {

/// One stochastic trajectory of the linear QSD equation. The pathwise norm is
/// not conserved; only the ensemble mean of the squared norm is 1.
struct Trajectory {
    TimeGrid grid;
    std::vector<std::vector<cplx>> psi;  ///< state per grid point
    std::uint64_t seed = 0;
    bool divergent = false;
};

/// Ensemble fidelity (or an exact analytic curve when n_traj = 0).
struct FidelityCurve {
    TimeGrid grid;
    std::vector<double> mean;
    std::vector<double> stderr_;
    long n_traj = 0;
};

/// Everything a trajectory needs that does not depend on the noise
/// realization: grids, cached coefficient series, per-cell detuning and the
/// exact phase integral of E. Immutable after construction; shared read-only
/// across trajectory workers.
struct TrajectoryContext {
    ModelSpec model;
    CorrelationSpec corr;
    Detuning detuning;
    TimeGrid grid;
    TimeGrid half_grid;
    CoeffSeries coeffs;            ///< on half_grid
    std::vector<double> E_cell;    ///< E at each integration cell midpoint
    std::vector<double> int_E;     ///< exact integral of E at full-grid points
    std::vector<double> phase_pattern;  ///< H_sys diagonal per unit E

    static TrajectoryContext build(const ModelSpec& model, const CorrelationSpec& corr,
                                   const Detuning& detuning, const TimeGrid& grid);

    /// Rotating-picture overlap <psi0|exp(+i Int H_sys)|psi> at full-grid point k.
    cplx rotating_overlap(std::span<const cplx> psi0, std::span<const cplx> psi,
                          std::size_t k) const;
};

/// RK4 propagation of -i H_eff(t) psi along the grid; H_eff is assembled from
/// the cached coefficients and the noise sample at each stage time (noise must
/// live on the half-step grid). Marks the trajectory divergent once the norm
/// exceeds `guard`.
Trajectory propagate_trajectory(const TrajectoryContext& ctx, const NoisePath& noise_half,
                                std::span<const cplx> psi0, double guard = 1e6);

/// Closed-form two-level stochastic transition amplitude <psi0|psi_t> on the
/// given noise path (lab frame, symmetric energy split), by cumulative
/// quadrature. Oracle for propagate_trajectory.
ComplexSeries two_level_amplitude(const TrajectoryContext& ctx, const NoisePath& noise_half);

struct EnsembleOptions {
    long n_traj = 1000;
    std::uint64_t master_seed = 1;
    int threads = 1;
    double divergence_guard = 1e6;
    double divergent_fraction_limit = 0.01;
    std::size_t output_stride = 0;          ///< 0 = auto (about 400 output points)
    std::vector<cplx> initial_state;        ///< empty = family default
};

struct EnsembleResult {
    FidelityCurve fidelity;   ///< rotating-picture survival probability
    FidelityCurve norm_sq;    ///< ensemble mean of the squared norm (consistency check)
    long divergent_count = 0;
    bool failed = false;      ///< more than the allowed fraction diverged
    std::vector<std::size_t> output_indices;  ///< full-grid indices of the output points
};

/// Mean and standard error of |<psi0|psi_t>|^2 over n_traj trajectories.
/// Trajectory i uses seed mix_seed(master_seed, i). Results are bit-identical
/// for any thread count: per-trajectory rows are reduced in index order.
EnsembleResult ensemble_fidelity(const TrajectoryContext& ctx, const EnsembleOptions& opts);

}  // namespace pqsd
