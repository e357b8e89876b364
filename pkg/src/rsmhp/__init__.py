"""Monte-Carlo multipath cost estimation for finite-horizon stochastic control.

Sampling schemes (branching tree, likeliness-pruned tree, independent paths)
and estimators (nominal, mean, likeliness-weighted) over a small model
abstraction, with exact analytic oracles for linear benchmarks, a target
tracking case study, and a reproducible experiment harness.
"""
from .model import (
    DegenerateNoise,
    DimensionError,
    DiscreteNoise,
    GaussianNoise,
    NoiseLaw,
    SamplingScheme,
    StochasticModel,
    Trajectory,
    TrajectorySet,
    as_controls,
    rollout,
    trajectory_cost,
)
from .sampling import (
    NoiseSharing,
    SamplerConfig,
    TreeSizeError,
    sample_independent,
    sample_tree,
    sample_tree_pruned,
)
from .estimators import (
    Estimate,
    EstimatorScheme,
    estimate_mean,
    estimate_nbo,
    estimate_weighted,
    normalize_weights,
)
from .linear import (
    LinearModel,
    LqgParams,
    chebyshev_bound,
    linear_stochastic_model,
    lqg_cost_variance,
    lqg_exact_cost,
    lqg_stochastic_model,
    nbo_error,
    power_sum,
    var_p,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateNoise",
    "DimensionError",
    "DiscreteNoise",
    "GaussianNoise",
    "NoiseLaw",
    "SamplingScheme",
    "StochasticModel",
    "Trajectory",
    "TrajectorySet",
    "as_controls",
    "rollout",
    "trajectory_cost",
    "NoiseSharing",
    "SamplerConfig",
    "TreeSizeError",
    "sample_independent",
    "sample_tree",
    "sample_tree_pruned",
    "Estimate",
    "EstimatorScheme",
    "estimate_mean",
    "estimate_nbo",
    "estimate_weighted",
    "normalize_weights",
    "LinearModel",
    "LqgParams",
    "chebyshev_bound",
    "linear_stochastic_model",
    "lqg_cost_variance",
    "lqg_exact_cost",
    "lqg_stochastic_model",
    "nbo_error",
    "power_sum",
    "var_p",
    "__version__",
]
