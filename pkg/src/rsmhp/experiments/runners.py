"""Experiment runners: one deterministic study per kind.

Each runner maps a validated spec to CSV tables plus a summary dict.  All
randomness is derived from the spec's master seed through named spawn keys,
so results are a pure function of the spec; worker counts only split work
across threads and never change a single value.  ``run_experiment`` is the
dispatch point that also writes the artifacts.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy import stats

from .. import __version__
from ..estimators import estimate_mean, estimate_nbo, estimate_weighted
from ..linear import (
    LinearModel,
    LqgParams,
    chebyshev_bound,
    linear_stochastic_model,
    lqg_exact_cost,
    lqg_stochastic_model,
    var_p,
)
from ..sampling import NoiseSharing, SamplerConfig, sample_independent, sample_tree, sample_tree_pruned
from ..uav import PlannerConfig, PlannerObjective, ScenarioConfig, run_monte_carlo
from .io import write_csv, write_json
from .spec import ExperimentKind, ExperimentSpec

__all__ = [
    "run_experiment",
    "run_lqg_convergence",
    "run_chebyshev_coverage",
    "run_variance_scaling",
    "run_pruning_study",
    "run_uav_monte_carlo",
    "run_covariance_decay",
]


def _map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _derived_seed(master_seed: int, *key: int) -> int:
    """A stable per-task seed from the master seed and a structured key."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return int(seq.generate_state(1, np.uint64)[0])


def _scalar_benchmark(params: dict):
    """The shared scalar linear test model and its exact expected cost.

    The stage and terminal costs are linear in the state and the noise has
    zero mean, so the exact expectation equals the nominal-path value.
    """
    model = LinearModel(
        a_matrix=params["a"],
        b_matrix=0.0,
        cost_state=params["cost"],
        cost_control=0.0,
        noise_cov=params["sigma"],
        horizon=params["horizon"],
    )
    stochastic = linear_stochastic_model(model, params["x0"])
    controls = [0.0] * params["horizon"]
    exact = estimate_nbo(stochastic, controls).value
    return model, stochastic, controls, exact


def run_lqg_convergence(spec: ExperimentSpec, workers: int = 1):
    """Mean-estimator and nominal errors across a grid of path counts."""
    p = spec.params
    lqg = LqgParams(
        a=p["a"], r=p["r"], target=p["target"],
        sigma=p["sigma"], x0=p["x0"], horizon=p["horizon"],
    )
    model = lqg_stochastic_model(lqg)
    controls = p["controls"]
    exact = lqg_exact_cost(lqg, controls)
    nominal = estimate_nbo(model, controls).value
    grid = list(range(p["p_min"], p["p_max"] + 1, p["p_step"]))

    def one(item):
        index, count = item
        config = SamplerConfig(
            branch_factor=count,
            master_seed=_derived_seed(spec.master_seed, 0, index),
            tree_cap=max(10**6, count),
        )
        sampled = estimate_mean(sample_independent(model, controls, config)).value
        return (
            count, sampled, nominal, exact,
            abs(sampled - exact), abs(nominal - exact),
        )

    rows = _map(one, list(enumerate(grid)), workers)
    header = ["p", "j_mhp", "j_nbo", "j_exact", "abs_err_mhp", "abs_err_nbo"]
    summary = {
        "rows": len(rows),
        "abs_err_nbo_max": max(row[5] for row in rows),
        "abs_err_nbo_min": min(row[5] for row in rows),
        "abs_err_mhp_last": rows[-1][4],
    }
    return {"results.csv": (header, rows)}, summary


def run_chebyshev_coverage(spec: ExperimentSpec, workers: int = 1):
    """Empirical tail probabilities of the mean estimator versus the bound."""
    p = spec.params
    model, stochastic, controls, exact = _scalar_benchmark(p)
    spread = var_p(model)
    if p["epsilon_unit"] == "deviation":
        epsilons = [eps * float(np.sqrt(spread)) for eps in p["epsilons"]]
    else:
        epsilons = list(p["epsilons"])

    rows = []
    for n_index, count in enumerate(p["n_values"]):
        def one(rep, _count=count, _n_index=n_index):
            config = SamplerConfig(
                branch_factor=_count,
                master_seed=_derived_seed(spec.master_seed, _n_index, rep),
            )
            value = estimate_mean(sample_independent(stochastic, controls, config)).value
            return abs(value - exact)

        errors = np.array(_map(one, range(p["reps"]), workers))
        for epsilon in epsilons:
            exceed = float(np.mean(errors >= epsilon))
            bound = chebyshev_bound(model, count, epsilon)
            rows.append((count, epsilon, exceed, bound))

    header = ["n", "epsilon", "exceed_probability", "bound"]
    summary = {
        "rows": len(rows),
        "var_p": spread,
        "exact_cost": exact,
        "max_excess_over_bound": max(row[2] - row[3] for row in rows),
    }
    return {"results.csv": (header, rows)}, summary


def run_variance_scaling(spec: ExperimentSpec, workers: int = 1):
    """Inter-replication variance of the mean estimator versus path count."""
    p = spec.params
    _, stochastic, controls, _ = _scalar_benchmark(p)

    rows = []
    for n_index, count in enumerate(p["n_values"]):
        def one(rep, _count=count, _n_index=n_index):
            config = SamplerConfig(
                branch_factor=_count,
                master_seed=_derived_seed(spec.master_seed, _n_index, rep),
            )
            return estimate_mean(sample_independent(stochastic, controls, config)).value

        values = np.array(_map(one, range(p["reps"]), workers))
        rows.append((count, p["reps"], float(np.var(values, ddof=1))))

    header = ["n", "reps", "variance"]
    counts = np.array([row[0] for row in rows], dtype=float)
    variances = np.array([row[2] for row in rows])
    slope = float(np.polyfit(np.log(counts), np.log(variances), 1)[0])
    summary = {"rows": len(rows), "log_log_slope": slope}
    return {"results.csv": (header, rows)}, summary


def run_pruning_study(spec: ExperimentSpec, workers: int = 1):
    """Error of pruned-tree estimators as the retained width varies."""
    p = spec.params
    _, stochastic, controls, exact = _scalar_benchmark(p)

    rows = []
    for m_index, width in enumerate(p["m_values"]):
        def one(rep, _width=width, _m_index=m_index):
            config = SamplerConfig(
                branch_factor=p["branch_factor"],
                prune_width=_width,
                noise_sharing=NoiseSharing.FRESH_PER_NODE,
                master_seed=_derived_seed(spec.master_seed, _m_index, rep),
            )
            trajectories = sample_tree_pruned(stochastic, controls, config)
            return (
                len(trajectories),
                abs(estimate_mean(trajectories).value - exact),
                abs(estimate_weighted(trajectories).value - exact),
            )

        results = _map(one, range(p["reps"]), workers)
        leaves = results[0][0]
        mean_errors = np.array([r[1] for r in results])
        weighted_errors = np.array([r[2] for r in results])
        rows.append(
            (
                width, leaves,
                float(np.median(mean_errors)),
                float(np.median(weighted_errors)),
            )
        )

    header = ["m", "leaves", "median_abs_err_mean", "median_abs_err_weighted"]
    best = min(rows, key=lambda row: row[3])
    summary = {
        "rows": len(rows),
        "best_m_weighted": best[0],
        "best_median_abs_err_weighted": best[3],
    }
    return {"results.csv": (header, rows)}, summary


def run_uav_monte_carlo(spec: ExperimentSpec, workers: int = 1):
    """Paired tracking studies: nominal planner versus sampled planners.

    All planner arms share the scenario seed, so every arm faces the same
    target paths and the same raw measurement noise.  One CDF file is
    written per arm.
    """
    p = spec.params
    scenario = ScenarioConfig(
        dt=p["dt"],
        n_steps=p["n_steps"],
        v_min=p["v_min"],
        v_max=p["v_max"],
        accel_max=p["accel_max"],
        bank_max=p["bank_max"],
        process_intensity=p["process_intensity"],
        sigma0=p["sigma0"],
        eta=p["eta"],
        uav_position=(p["uav_x"], p["uav_y"]),
        uav_heading=p["uav_heading"],
        uav_speed=p["uav_speed"],
        target_mean=np.array(p["target_mean"]),
        target_cov=np.diag(
            [p["target_pos_var"], p["target_pos_var"],
             p["target_vel_var"], p["target_vel_var"]]
        ),
        master_seed=spec.master_seed,
    )
    arms = []
    if p["include_nbo"]:
        arms.append(
            ("nbo", PlannerConfig(
                horizon=p["horizon"], n_trajectories=1,
                objective=PlannerObjective.NBO,
                eval_budget=p["eval_budget"], master_seed=spec.master_seed,
            ))
        )
    for count in p["nt_values"]:
        arms.append(
            (f"nt{count}", PlannerConfig(
                horizon=p["horizon"], n_trajectories=count,
                objective=PlannerObjective.RSMHP,
                eval_budget=p["eval_budget"], master_seed=spec.master_seed,
            ))
        )

    tables = {}
    summary = {"arms": {}}
    for name, config in arms:
        errors = run_monte_carlo(scenario, config, p["n_runs"], workers=workers)
        order = np.argsort(errors, kind="stable")
        ordered = errors[order]
        rows = [
            (int(run), float(err), float((rank + 1) / p["n_runs"]))
            for rank, (run, err) in enumerate(zip(order, ordered))
        ]
        tables[f"cdf_{name}.csv"] = (["run_index", "mean_error", "cdf"], rows)
        summary["arms"][name] = {
            "mean": float(ordered.mean()),
            "median": float(np.median(ordered)),
        }
    return tables, summary


def run_covariance_decay(spec: ExperimentSpec, workers: int = 1):
    """Cross-branch cost covariance z-tests on the fresh-noise tree.

    Leaves are indexed in branch-digit order, so two leaves whose indices
    differ by more than the branch factor sit in different first-level
    subtrees and share no noise draws; their covariances should pass a
    zero-mean test.
    """
    p = spec.params
    _, stochastic, controls, _ = _scalar_benchmark(p)
    branch = p["branch_factor"]
    reps = p["reps"]
    n_leaves = branch ** (p["horizon"] - 1)

    def one(rep):
        config = SamplerConfig(
            branch_factor=branch,
            noise_sharing=NoiseSharing.FRESH_PER_NODE,
            master_seed=_derived_seed(spec.master_seed, 0, rep),
        )
        return sample_tree(stochastic, controls, config).costs

    costs = np.array(_map(one, range(reps), workers))
    centered = costs - costs.mean(axis=0)

    rows = []
    for i in range(n_leaves):
        for j in range(i + 1, n_leaves):
            products = centered[:, i] * centered[:, j]
            covariance = float(products.sum() / (reps - 1))
            scale = float(products.std(ddof=1))
            z = float(products.mean() / (scale / np.sqrt(reps))) if scale > 0 else 0.0
            rows.append((i, j, j - i, covariance, z))

    header = ["i", "j", "lag", "covariance", "z"]
    critical = float(stats.norm.ppf(0.995))
    far = [row for row in rows if row[2] > branch]
    summary = {
        "rows": len(rows),
        "critical_z_two_sided_1pct": critical,
        "max_abs_z_beyond_branch_factor": max(abs(row[4]) for row in far) if far else 0.0,
        "pairs_beyond_branch_factor": len(far),
    }
    return {"results.csv": (header, rows)}, summary


_RUNNERS = {
    ExperimentKind.LQG_CONVERGENCE: run_lqg_convergence,
    ExperimentKind.CHEBYSHEV_COVERAGE: run_chebyshev_coverage,
    ExperimentKind.VARIANCE_SCALING: run_variance_scaling,
    ExperimentKind.PRUNING_STUDY: run_pruning_study,
    ExperimentKind.UAV_MONTE_CARLO: run_uav_monte_carlo,
    ExperimentKind.COVARIANCE_DECAY: run_covariance_decay,
}


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> dict:
    """Run one experiment and write its CSV tables plus metadata JSON.

    Returns the metadata dict.  Output lands only inside ``spec.output``;
    rerunning an identical spec overwrites the same files with identical
    bytes (the metadata's wall time aside).
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    runner = _RUNNERS[spec.kind]
    start = time.perf_counter()
    tables, summary = runner(spec, workers)
    wall_time = time.perf_counter() - start

    out_dir = Path(spec.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(tables)
    for name in files:
        header, rows = tables[name]
        write_csv(out_dir / name, header, rows)
    metadata = {
        "kind": spec.kind.value,
        "master_seed": spec.master_seed,
        "parameters": spec.params,
        "library_version": __version__,
        "wall_time_seconds": wall_time,
        "files": files,
        "summary": summary,
    }
    write_json(out_dir / "metadata.json", metadata)
    return metadata
