"""Closed-form analysis for linear-dynamics benchmarks.

Two exactly solvable families used as oracles for the Monte-Carlo machinery:

* A linear-Gaussian model with linear stage cost c'x + d'u, whose
  per-trajectory cost variance has the closed form
  var_p = c' [ sum_k A_k Sigma A_k' ] c  with  A_k = sum_{q=0}^{H-k-1} A^q,
  feeding a Chebyshev tail bound on the sample-mean estimator.

* A scalar tracking problem x_{k+1} = (1-a) x_k + a u_k + w_k with cost
  r (x_H - T)^2 + sum u_k^2, whose expected cost and nominal-path error
  r sigma^2 sum_{n<H} (1-a)^{2n} are exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Array,
    DegenerateNoise,
    DimensionError,
    GaussianNoise,
    StochasticModel,
)

__all__ = [
    "LinearModel",
    "LqgParams",
    "power_sum",
    "var_p",
    "chebyshev_bound",
    "lqg_exact_cost",
    "lqg_cost_variance",
    "nbo_error",
    "linear_stochastic_model",
    "lqg_stochastic_model",
]


class LinearModel:
    """Linear dynamics x' = A x + B u + w with linear stage cost c'x + d'u.

    The noise is zero-mean Gaussian with covariance ``noise_cov`` (positive
    semidefinite; symmetric within 1e-12).  ``cost_state`` and
    ``cost_control`` are the row vectors c and d.
    """

    def __init__(self, a_matrix, b_matrix, cost_state, cost_control, noise_cov, horizon: int) -> None:
        a_matrix = np.atleast_2d(np.asarray(a_matrix, dtype=float))
        n = a_matrix.shape[0]
        if a_matrix.shape != (n, n):
            raise DimensionError(f"A must be square, got {a_matrix.shape}")
        b_matrix = np.asarray(b_matrix, dtype=float)
        if b_matrix.ndim == 0:
            b_matrix = b_matrix.reshape(1, 1)
        elif b_matrix.ndim == 1:
            b_matrix = b_matrix[:, None]
        if b_matrix.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {b_matrix.shape}")
        m = b_matrix.shape[1]
        cost_state = np.atleast_1d(np.asarray(cost_state, dtype=float)).ravel()
        if cost_state.shape != (n,):
            raise DimensionError(f"cost_state must have {n} entries, got {cost_state.shape}")
        cost_control = np.atleast_1d(np.asarray(cost_control, dtype=float)).ravel()
        if cost_control.shape != (m,):
            raise DimensionError(f"cost_control must have {m} entries, got {cost_control.shape}")
        noise_cov = np.atleast_2d(np.asarray(noise_cov, dtype=float))
        if noise_cov.shape != (n, n):
            raise DimensionError(f"noise_cov must be ({n}, {n}), got {noise_cov.shape}")
        if not np.allclose(noise_cov, noise_cov.T, rtol=1e-12, atol=1e-12):
            raise ValueError("noise_cov must be symmetric")
        eigs = np.linalg.eigvalsh(noise_cov)
        scale = max(1.0, float(np.abs(eigs).max()) if eigs.size else 1.0)
        if eigs.size and eigs.min() < -1e-12 * scale:
            raise ValueError("noise_cov must be positive semidefinite")
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        self.a_matrix = a_matrix
        self.b_matrix = b_matrix
        self.cost_state = cost_state
        self.cost_control = cost_control
        self.noise_cov = noise_cov
        self.horizon = horizon
        self.state_dim = n
        self.control_dim = m


def power_sum(a_matrix, horizon: int, k: int) -> Array:
    """Matrix polynomial sum_{q=0}^{horizon-k-1} A^q by repeated multiplication.

    At k = horizon-1 the sum is the identity (single q=0 term).
    """
    a_matrix = np.atleast_2d(np.asarray(a_matrix, dtype=float))
    n = a_matrix.shape[0]
    if a_matrix.shape != (n, n):
        raise DimensionError(f"A must be square, got {a_matrix.shape}")
    if not 0 <= k <= horizon - 1:
        raise ValueError(f"k must be in [0, {horizon - 1}], got {k}")
    total = np.eye(n)
    power = np.eye(n)
    for _ in range(horizon - k - 1):
        power = power @ a_matrix
        total = total + power
    return total


def var_p(model: LinearModel) -> float:
    """Exact variance of the per-trajectory cost under independent paths.

    Each step's noise enters the remaining stage costs through the powers of
    A, so its contribution is c' A_k Sigma A_k' c with A_k = power_sum(A, H, k).
    """
    c = model.cost_state
    accum = np.zeros((model.state_dim, model.state_dim))
    for k in range(model.horizon):
        weight = power_sum(model.a_matrix, model.horizon, k)
        accum = accum + weight @ model.noise_cov @ weight.T
    return float(c @ accum @ c)


def chebyshev_bound(model: LinearModel, n_samples: int, epsilon: float, clamp: bool = True) -> float:
    """Tail bound P(|J_N - J| >= epsilon) <= var_p / (N epsilon^2).

    With ``clamp`` (the default) the bound is truncated to [0, 1], since it
    is vacuous above 1; pass clamp=False for the raw value.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    bound = var_p(model) / (n_samples * epsilon * epsilon)
    if clamp:
        return min(bound, 1.0)
    return bound


@dataclass(frozen=True)
class LqgParams:
    """Scalar tracking benchmark parameters.

    Dynamics x_{k+1} = (1-a) x_k + a u_k + w_k with w_k ~ N(0, sigma^2),
    cost r (x_H - target)^2 + sum_k u_k^2.  sigma = 0 is allowed and makes
    the problem deterministic.
    """

    a: float
    r: float
    target: float
    sigma: float
    x0: float
    horizon: int

    def __post_init__(self) -> None:
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"a must lie in (0, 1), got {self.a}")
        if self.r <= 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")


def _lqg_mean_terminal(params: LqgParams, controls: Array) -> float:
    x = params.x0
    for k in range(params.horizon):
        x = (1.0 - params.a) * x + params.a * controls[k] + 0.0
    return x


def nbo_error(params: LqgParams) -> float:
    """Exact gap between the expected cost and the nominal-path cost.

    r sigma^2 sum_{n=0}^{H-1} (1-a)^(2n): the variance of x_H scaled by the
    terminal weight.  Independent of the controls.
    """
    decay = (1.0 - params.a) ** 2
    total = 0.0
    term = 1.0
    for _ in range(params.horizon):
        total += term
        term *= decay
    return params.r * params.sigma**2 * total


def lqg_exact_cost(params: LqgParams, controls) -> float:
    """Exact expected cost: nominal terminal tracking + control effort + noise term."""
    u = np.atleast_1d(np.asarray(controls, dtype=float)).ravel()
    if u.shape != (params.horizon,):
        raise DimensionError(
            f"controls must have {params.horizon} entries, got {u.shape}"
        )
    mean_terminal = _lqg_mean_terminal(params, u)
    deterministic = params.r * (mean_terminal - params.target) ** 2 + float(u @ u)
    return deterministic + nbo_error(params)


def lqg_cost_variance(params: LqgParams, controls) -> float:
    """Exact variance of the per-trajectory cost under fixed controls.

    Only the terminal term fluctuates: x_H = m + v with v ~ N(0, V) where
    V = sigma^2 sum_{n<H} (1-a)^{2n} and m is the nominal terminal state, so

        Var[r (x_H - T)^2] = r^2 (2 V^2 + 4 mu^2 V),   mu = m - T.

    Divide by the path count for the variance of the sample-mean estimator;
    its standard error is the square root of that.
    """
    u = np.atleast_1d(np.asarray(controls, dtype=float)).ravel()
    if u.shape != (params.horizon,):
        raise DimensionError(
            f"controls must have {params.horizon} entries, got {u.shape}"
        )
    spread = nbo_error(params) / params.r
    mu = _lqg_mean_terminal(params, u) - params.target
    return params.r**2 * (2.0 * spread**2 + 4.0 * mu**2 * spread)


def linear_stochastic_model(model: LinearModel, initial_state) -> StochasticModel:
    """Simulation twin of a LinearModel (with vectorized fast paths).

    The cost is sum_{k=0}^{H-1} (c'x_k + d'u_k) plus a terminal c'x_H, so
    each noise draw w_k reaches the cost through states x_{k+1}..x_H; that
    is the convention var_p describes.  (The deterministic c'x_0 term only
    shifts the mean.)  The expected cost therefore equals the nominal-path
    cost, and estimate_nbo gives the exact expectation.
    """
    a_matrix = model.a_matrix
    b_matrix = model.b_matrix
    c = model.cost_state
    d = model.cost_control
    if np.allclose(model.noise_cov, 0.0):
        noise = DegenerateNoise(np.zeros(model.state_dim))
    else:
        noise = GaussianNoise(np.zeros(model.state_dim), model.noise_cov)

    def transition(x, u, w):
        return a_matrix @ x + b_matrix @ u + w

    def transition_batch(xs, u, ws):
        return xs @ a_matrix.T + b_matrix @ u + ws

    def stage_cost(x, u):
        return float(c @ x + d @ u)

    def stage_cost_batch(xs, u):
        return xs @ c + float(d @ u)

    def terminal_cost(x):
        return float(c @ x)

    def terminal_cost_batch(xs):
        return xs @ c

    return StochasticModel(
        state_dim=model.state_dim,
        control_dim=model.control_dim,
        transition=transition,
        stage_cost=stage_cost,
        noise=noise,
        horizon=model.horizon,
        initial_state=initial_state,
        transition_batch=transition_batch,
        stage_cost_batch=stage_cost_batch,
        terminal_cost=terminal_cost,
        terminal_cost_batch=terminal_cost_batch,
    )


def lqg_stochastic_model(params: LqgParams) -> StochasticModel:
    """Simulation twin of the scalar tracking benchmark (vectorized fast paths)."""
    a = params.a
    r = params.r
    target = params.target
    if params.sigma == 0.0:
        noise = DegenerateNoise([0.0])
    else:
        noise = GaussianNoise([0.0], [[params.sigma**2]])

    def transition(x, u, w):
        return (1.0 - a) * x + a * u + w

    def stage_cost(x, u):
        return float(u[0] * u[0])

    def stage_cost_batch(xs, u):
        return np.full(xs.shape[0], u[0] * u[0])

    def terminal_cost(x):
        return float(r * (x[0] - target) ** 2)

    def terminal_cost_batch(xs):
        return r * (xs[:, 0] - target) ** 2

    return StochasticModel(
        state_dim=1,
        control_dim=1,
        transition=transition,
        stage_cost=stage_cost,
        noise=noise,
        horizon=params.horizon,
        initial_state=[params.x0],
        terminal_cost=terminal_cost,
        transition_batch=transition,
        stage_cost_batch=stage_cost_batch,
        terminal_cost_batch=terminal_cost_batch,
    )
