#pragma once

#include <stdexcept>
#include <string>

#include "pqsd/models.hpp"

namespace pqsd {

/// Configuration problem with a file:line diagnostic.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One complete run description, parsed from the sectioned key=value format:
///   [model]        family, omega, kappa, N
///   [correlation]  Gamma, gamma
///   [pulse]        enabled, tau, delta, psi
///   [run]          t_end, dt, n_traj, master_seed, initial_state
///   [analytic]     enabled, coarsen
///   [pq]           p_basis
///   [output]       directory, label
/// Unknown sections or keys are rejected with line-precise diagnostics.
/// Amplitude lists are whitespace-separated; each entry is a real number or a
/// complex "(re,im)" pair.
struct RunConfig {
    ModelSpec model;
    CorrelationSpec corr;
    PulseTrain pulse;

    double t_end = 10.0;
    double dt = 1e-3;
    long n_traj = 1000;
    std::uint64_t master_seed = 1;
    std::vector<cplx> initial_state;  ///< empty = family default

    bool analytic_enabled = true;
    std::size_t analytic_coarsen = 4;

    std::vector<cplx> pq_p_basis;  ///< empty = family initial state

    std::string output_directory = "out";
    std::string output_label = "run";

    void validate() const;  ///< semantic checks beyond parsing

    /// Integration grid aligned with the pulse edges.
    TimeGrid make_grid() const;
    Detuning make_detuning() const { return Detuning{model.omega, pulse}; }
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config_file(const std::string& path);

/// Canonical round-trippable text form (full precision); embedded into every
/// output file so a run can be reproduced from its artifacts.
std::string serialize_config(const RunConfig& cfg);

}  // namespace pqsd
