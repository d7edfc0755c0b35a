#pragma once

#include <iosfwd>

#include "pqsd/analytic.hpp"
#include "pqsd/config.hpp"
#include "pqsd/pq.hpp"

namespace pqsd {

/// Outputs of one run: canonical CSV plus a gnuplot convenience script.
struct RunArtifacts {
    std::string csv_path;
    std::string plot_path;
    EnsembleResult ensemble;
    FidelityCurve analytic;        ///< empty when analytic.enabled = false
    bool quality_failed = false;   ///< too many divergent trajectories
};

/// Execute the MC ensemble (and the family's closed-form evaluator when
/// enabled), then write `<label>.csv` and `<label>.gp` under the output
/// directory. CSV: `#`-prefixed metadata (full config echo), then
/// t,fidelity_mc,stderr_mc[,fidelity_analytic],n_traj,divergent_count with 9
/// significant digits. Output is byte-identical across reruns and thread
/// counts for a fixed config.
RunArtifacts run_experiment(const RunConfig& cfg, int threads = 1,
                            const std::string& out_override = "");

/// Closed-form curve for the config's model family.
FidelityCurve analytic_fidelity(const RunConfig& cfg, const TrajectoryContext& ctx);

/// Curve value at time t by linear interpolation between grid points.
double curve_at(const FidelityCurve& curve, double t);

struct SweepOutcome {
    std::vector<RunArtifacts> points;
    std::string summary_path;
    bool quality_failed = false;
};

/// One run per axis value (axis: gamma | tau_over_delta | psi | N), each with
/// the derived seed mix_seed(master_seed, point index) and its own table;
/// the summary CSV holds the fidelity at the checkpoint times (default:
/// t_end) per point.
SweepOutcome sweep(const RunConfig& cfg, const std::string& axis,
                   const std::vector<double>& values, std::vector<double> checkpoints,
                   int threads = 1, const std::string& out_override = "");

/// Self-validation suite: noise correlation statistics, the closed-form
/// pathwise amplitude oracle, PQ-vs-full-space equivalence for all three
/// families, the N = 1 reduction identity, and the closed-form propagator
/// check. Prints one pass/fail line per item; returns true iff all pass.
/// noise_scale != 1 deliberately corrupts the sampled noise (fault-injection
/// hook; the correlation check must then fail).
bool validate_run(const RunConfig& cfg, std::ostream& report, double noise_scale = 1.0);

}  // namespace pqsd
