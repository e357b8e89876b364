"""Seeded experiment harness: config files in, CSV and JSON artifacts out."""
from .io import format_cell, read_csv, write_csv, write_json
from .runners import (
    run_chebyshev_coverage,
    run_covariance_decay,
    run_experiment,
    run_lqg_convergence,
    run_pruning_study,
    run_uav_monte_carlo,
    run_variance_scaling,
)
from .spec import ConfigError, ExperimentKind, ExperimentSpec, describe_kinds, load_spec

__all__ = [
    "ConfigError",
    "ExperimentKind",
    "ExperimentSpec",
    "describe_kinds",
    "load_spec",
    "run_experiment",
    "run_lqg_convergence",
    "run_chebyshev_coverage",
    "run_variance_scaling",
    "run_pruning_study",
    "run_uav_monte_carlo",
    "run_covariance_decay",
    "format_cell",
    "read_csv",
    "write_csv",
    "write_json",
]
