"""Stochastic simulator for pulse-controlled open-system subspaces."""

from ._pqsd import (
    ConfigError,
    CorrelationSpec,
    EnsembleResult,
    FidelityCurve,
    ModelFamily,
    ModelSpec,
    PulseTrain,
    RunConfig,
    analytic_fidelity,
    ensemble_fidelity,
    mix_seed,
    parse_config,
    parse_config_file,
    run_experiment,
    sample_noise_path,
    serialize_config,
    validate,
)

__all__ = [
    "ConfigError",
    "CorrelationSpec",
    "EnsembleResult",
    "FidelityCurve",
    "ModelFamily",
    "ModelSpec",
    "PulseTrain",
    "RunConfig",
    "analytic_fidelity",
    "ensemble_fidelity",
    "mix_seed",
    "parse_config",
    "parse_config_file",
    "run_experiment",
    "sample_noise_path",
    "serialize_config",
    "validate",
]
