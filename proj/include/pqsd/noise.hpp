#pragma once

#include <cstdint>
#include <iosfwd>

#include "pqsd/numerics.hpp"

namespace pqsd {

/// Bath parameters of the Ornstein-Uhlenbeck correlation
/// alpha(t,s) = (Gamma*gamma/2) * exp(-gamma*|t-s|).
struct CorrelationSpec {
    double Gamma = 1.0;  ///< dissipation rate (sets the time unit)
    double gamma = 1.0;  ///< inverse memory time

    void validate() const;
    double alpha(double t, double s) const;
    /// Equal-time variance Gamma*gamma/2.
    double variance() const { return 0.5 * Gamma * gamma; }
};

/// One realization of the complex colored noise z*_t on a grid.
/// Regenerating with the same (spec, grid, seed) reproduces the samples
/// bit-for-bit; the RNG algorithm is fixed (see rng.hpp).
struct NoisePath {
    TimeGrid grid;
    std::vector<cplx> samples;  ///< z*_t, one per grid point
    std::uint64_t seed = 0;
};

/// Exact one-step discretization of the OU recursion over spacing delta:
/// z_{k+1} = decay * z_k + xi_k, xi_k circular complex Gaussian with
/// per-component standard deviation innovation_sd.
struct OuStepCoeffs {
    double decay;
    double innovation_sd;
};
OuStepCoeffs ou_step_coeffs(const CorrelationSpec& spec, double delta);

/// Stationary complex Gaussian path with M[z_t z*_s] = alpha(t,s) and
/// M[z_t z_s] = 0, built by the exact OU recursion (no discretization bias
/// for any spacing). Gamma = 0 yields the all-zero path.
/// innovation_scale != 1 is a fault-injection hook for self-tests.
NoisePath sample_path(const CorrelationSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                      double innovation_scale = 1.0);

struct CorrelationEstimate {
    cplx mean;
    double stderr_;
};

/// Sample mean of z_{t_i} z*_{t_j} over >= 100 paths sharing one grid.
CorrelationEstimate estimate_correlation(const std::vector<NoisePath>& paths, std::size_t i,
                                         std::size_t j);
/// Non-conjugate moment M[z_{t_i} z_{t_j}] (zero for a circular process).
CorrelationEstimate estimate_pseudo_correlation(const std::vector<NoisePath>& paths, std::size_t i,
                                                std::size_t j);

/// Debug dump: CSV with columns t, Re(z*), Im(z*).
void write_path_csv(std::ostream& os, const NoisePath& path);

/// Documented mixing function deriving per-trajectory seeds from
/// (master_seed, trajectory_index). splitmix64 of master XOR golden-ratio
/// multiple of (index+1).
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace pqsd
