"""Receding-horizon planning against the tracking objective.

The planner scores a candidate control sequence by the accumulated trace
of the filter covariance along the planned vehicle path.  Two scorers are
provided: a nominal one (future noise replaced by its mean, so one
deterministic covariance recursion) and a sampled one (average over
independently drawn target futures with sampled measurements).  A budgeted
simplex search with restarts minimizes the scorer over the flattened
(acceleration, bank) sequence.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dynamics import UavControl, target_process_cov, target_transition_matrix
from .filtering import TargetBelief, _batch_predict, _batch_update, _joseph_cov_update
from .scenario import ScenarioConfig

__all__ = [
    "PlannerObjective",
    "PlannerConfig",
    "objective_nbo",
    "objective_mhp",
    "scenario_objective_terms",
    "plan_step",
]


class PlannerObjective(enum.Enum):
    """Which scorer the planner minimizes."""

    NBO = "nbo"
    RSMHP = "rsmhp"


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 6
    n_trajectories: int = 50
    objective: PlannerObjective = PlannerObjective.NBO
    eval_budget: int = 120
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.n_trajectories < 1:
            raise ValueError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if self.eval_budget < 1:
            raise ValueError(f"eval_budget must be >= 1, got {self.eval_budget}")
        if not isinstance(self.objective, PlannerObjective):
            raise ValueError(f"objective must be a PlannerObjective, got {self.objective!r}")


def _as_control_pairs(controls, horizon: int) -> np.ndarray:
    arr = np.asarray(
        [(c.forward_acceleration, c.bank_angle) for c in controls], dtype=float
    )
    if arr.shape != (horizon, 2):
        raise ValueError(f"expected {horizon} controls, got {arr.shape[0]}")
    return arr


def _planned_path(uav, control_pairs, scenario) -> np.ndarray:
    """Vehicle positions after each of the H planned steps, shape (H, 2).

    Same kinematics as uav_step, inlined with scalars since the path does
    not depend on the sampled futures and sits inside the optimizer's inner
    loop.
    """
    horizon = control_pairs.shape[0]
    x, y = float(uav.position[0]), float(uav.position[1])
    heading = uav.heading
    speed = uav.speed
    dt = scenario.dt
    path = np.empty((horizon, 2))
    for k in range(horizon):
        accel, bank = control_pairs[k]
        speed = min(max(speed + accel * dt, scenario.v_min), scenario.v_max)
        heading = heading + scenario.gravity * np.tan(bank) / speed * dt
        x += speed * np.cos(heading) * dt
        y += speed * np.sin(heading) * dt
        path[k, 0] = x
        path[k, 1] = y
    return path


def _target_matrices(scenario):
    """Transition, process covariance, and its factor for one time step."""
    f = target_transition_matrix(scenario.dt)
    q = target_process_cov(scenario.process_intensity, scenario.dt)
    if scenario.process_intensity > 0.0:
        q_root = np.linalg.cholesky(q)
    else:
        q_root = np.zeros((4, 4))
    return f, q, q_root


def _trace_rollout(uav, belief, control_pairs, scenario, truths, process_raw, meas_raw, mats=None):
    """Accumulated covariance trace per sampled future along one vehicle path.

    ``truths`` is the (n, 4) stack of sampled current target states;
    ``process_raw`` and ``meas_raw`` hold the frozen standard-normal draws,
    shaped (n, H, 4) and (n, H, 2).  Passing ``truths = None`` runs the
    nominal recursion instead: one future pinned to the belief mean, zero
    innovations, covariance arithmetic only.  Returns (n,) totals.
    """
    horizon = control_pairs.shape[0]
    f, q, q_root = mats if mats is not None else _target_matrices(scenario)
    path = _planned_path(uav, control_pairs, scenario)
    nominal = truths is None
    n = 1 if nominal else truths.shape[0]
    covs = np.broadcast_to(belief.covariance, (n, 4, 4)).copy()
    totals = np.zeros(n)
    sigma0_sq = scenario.sigma0**2
    eta = scenario.eta
    if nominal:
        # Zero innovations leave the mean on its noiseless prediction, so
        # only that prediction and the covariances need computing.
        mean = belief.mean
        for k in range(horizon):
            mean = f @ mean
            covs = f @ covs @ f.T + q
            dx = mean[0] - path[k, 0]
            dy = mean[1] - path[k, 1]
            noise_vars = np.array([sigma0_sq + eta * (dx * dx + dy * dy)])
            _, covs = _joseph_cov_update(covs, noise_vars)
            totals += np.einsum("nii->n", covs)
        return totals
    means = np.broadcast_to(belief.mean, (n, 4)).copy()
    truths = truths.copy()
    for k in range(horizon):
        truths = truths @ f.T + process_raw[:, k] @ q_root.T
        means, covs = _batch_predict(means, covs, f, q)
        delta = truths[:, :2] - path[k]
        noise_vars = sigma0_sq + eta * (delta[:, 0] ** 2 + delta[:, 1] ** 2)
        measurements = truths[:, :2] + np.sqrt(noise_vars)[:, None] * meas_raw[:, k]
        means, covs = _batch_update(means, covs, measurements, noise_vars)
        totals += np.einsum("nii->n", covs)
    return totals


def objective_nbo(uav, belief: TargetBelief, controls, scenario: ScenarioConfig) -> float:
    """Nominal tracking objective: noise-free target, zero innovations.

    The target mean follows the noiseless constant-velocity prediction, the
    measurement is assumed to land exactly there, and only the covariance
    recursion (with range-dependent noise along the planned path) matters.
    """
    pairs = _as_control_pairs(controls, len(controls))
    totals = _trace_rollout(uav, belief, pairs, scenario, None, None, None)
    return float(totals[0])


def _frozen_draws(config: PlannerConfig, horizon: int, rng: np.random.Generator):
    """Per-future frozen standard normals, derived one sub-seed per future.

    Each future gets its own child seed, so the first future of an
    n_trajectories = 2 evaluation is draw-identical to an n_trajectories = 1
    evaluation started from the same generator state.
    """
    seeds = rng.integers(np.iinfo(np.int64).max, size=config.n_trajectories)
    process_raw = np.empty((config.n_trajectories, horizon, 4))
    meas_raw = np.empty((config.n_trajectories, horizon, 2))
    for i, seed in enumerate(seeds):
        child = np.random.default_rng(int(seed))
        block = child.standard_normal((horizon, 6))
        process_raw[i] = block[:, :4]
        meas_raw[i] = block[:, 4:]
    return process_raw, meas_raw


def scenario_objective_terms(
    uav,
    belief: TargetBelief,
    controls,
    scenario: ScenarioConfig,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per-future accumulated covariance traces for the sampled objective."""
    pairs = _as_control_pairs(controls, config.horizon)
    process_raw, meas_raw = _frozen_draws(config, config.horizon, rng)
    truths = np.broadcast_to(belief.mean, (config.n_trajectories, 4))
    return _trace_rollout(uav, belief, pairs, scenario, truths, process_raw, meas_raw)


def objective_mhp(
    uav,
    belief: TargetBelief,
    controls,
    scenario: ScenarioConfig,
    config: PlannerConfig,
    rng: np.random.Generator,
) -> float:
    """Sampled tracking objective: average trace total over drawn futures."""
    terms = scenario_objective_terms(uav, belief, controls, scenario, config, rng)
    return float(terms.mean())


def plan_step(
    uav,
    belief: TargetBelief,
    scenario: ScenarioConfig,
    config: PlannerConfig,
    rng: np.random.Generator,
):
    """Pick the next control by budgeted simplex descent over H (accel, bank) pairs.

    The search runs in coordinates normalized to [-1, 1] per component and
    projects every candidate into bounds before scoring, so the returned
    control always respects the actuator limits.  Sampled futures are drawn
    once and reused for every evaluation (common random numbers), which
    keeps the objective deterministic during the search.  Leftover budget
    after the first descent funds restarts from the best point so far,
    perturbed by the supplied generator.  Returns the first control of the
    best sequence found (the initial straight-flight guess if nothing
    strictly improves on it).
    """
    horizon = config.horizon
    dim = 2 * horizon
    scales = np.tile([scenario.accel_max, scenario.bank_max], horizon)
    mats = _target_matrices(scenario)

    if config.objective is PlannerObjective.RSMHP:
        process_raw, meas_raw = _frozen_draws(config, horizon, rng)
        truths0 = np.broadcast_to(belief.mean, (config.n_trajectories, 4))
    else:
        process_raw = None
        meas_raw = None
        truths0 = None

    budget = config.eval_budget
    state = {"evals": 0, "best_y": np.zeros(dim), "best_value": None}

    def score(y):
        y = np.clip(y, -1.0, 1.0)
        pairs = (y * scales).reshape(horizon, 2)
        totals = _trace_rollout(
            uav, belief, pairs, scenario, truths0, process_raw, meas_raw, mats
        )
        return float(totals.mean())

    def objective(y):
        if state["evals"] >= budget:
            # Out of budget: hand the optimizer a flat surface so it stops
            # moving; best-so-far is already recorded.
            return state["best_value"]
        state["evals"] += 1
        value = score(y)
        if state["best_value"] is None or value < state["best_value"]:
            state["best_value"] = value
            state["best_y"] = np.clip(y, -1.0, 1.0)
        return value

    objective(state["best_y"])  # score the straight-flight guess first
    start = state["best_y"]
    while state["evals"] < budget:
        remaining = budget - state["evals"]
        if remaining < dim + 2:
            break
        minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "maxfev": remaining,
                "xatol": 1e-3,
                "fatol": 1e-9,
                "initial_simplex": _initial_simplex(start, 0.25),
            },
        )
        start = np.clip(state["best_y"] + rng.uniform(-0.2, 0.2, size=dim), -1.0, 1.0)

    best = state["best_y"] * scales
    return UavControl(forward_acceleration=float(best[0]), bank_angle=float(best[1]))


def _initial_simplex(center: np.ndarray, step: float) -> np.ndarray:
    dim = center.shape[0]
    simplex = np.tile(center, (dim + 1, 1))
    for i in range(dim):
        # Step toward the interior when already at the upper bound.
        simplex[i + 1, i] += step if center[i] <= 1.0 - step else -step
    return simplex
