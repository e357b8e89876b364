"""Samplers: tree growth, likeliness pruning, independent paths, determinism."""
from __future__ import annotations

import numpy as np
import pytest

from conftest import CyclicNoise, accumulator_model, likeliness_rank, set_arrays_equal

from rsmhp import (
    DegenerateNoise,
    GaussianNoise,
    LqgParams,
    NoiseSharing,
    SamplerConfig,
    SamplingScheme,
    StochasticModel,
    TreeSizeError,
    estimate_nbo,
    lqg_stochastic_model,
    sample_independent,
    sample_tree,
    sample_tree_pruned,
)
from rsmhp.sampling import _sample_tree_pruned_logged


def _lqg(horizon=2, sigma=1.0):
    return lqg_stochastic_model(
        LqgParams(a=0.5, r=10.0, target=1.0, sigma=sigma, x0=0.0, horizon=horizon)
    )


def _loop_only_model(horizon=2):
    """Scalar model without vectorized callables (exercises the loop path)."""
    return StochasticModel(
        state_dim=1,
        control_dim=1,
        transition=lambda x, u, w: 0.5 * x + 0.5 * u + w,
        stage_cost=lambda x, u: float(u[0] ** 2),
        noise=GaussianNoise([0.0], [[1.0]]),
        horizon=horizon,
        initial_state=[0.0],
        terminal_cost=lambda x: float(10.0 * (x[0] - 1.0) ** 2),
    )


def test_tree_count_is_branching_power():
    assert len(sample_tree(_lqg(2), [0.5, 0.2], SamplerConfig(branch_factor=3))) == 3
    out = sample_tree(_lqg(3), [0.5, 0.2, 0.1], SamplerConfig(branch_factor=3))
    assert len(out) == 9
    assert out.scheme is SamplingScheme.TREE


def test_tree_count_small_grid():
    for n in (1, 2, 4):
        for horizon in (1, 2, 3, 4):
            model = _lqg(horizon)
            out = sample_tree(model, np.zeros(horizon), SamplerConfig(branch_factor=n))
            assert len(out) == n ** (horizon - 1)


def test_tree_branch_order_is_left_to_right_digits():
    out = sample_tree(_lqg(3), [0.5, 0.2, 0.1], SamplerConfig(branch_factor=3))
    expected = [[i, j] for i in range(3) for j in range(3)]
    assert out.branch_paths.tolist() == expected


def test_tree_enumerates_sign_sequences_with_shared_draws():
    noise = CyclicNoise([-1.0, 1.0], [0.5, 0.5])
    model = accumulator_model(noise, horizon=3)
    cfg = SamplerConfig(branch_factor=2, noise_sharing=NoiseSharing.SHARED_PER_DEPTH)
    out = sample_tree(model, np.zeros(3), cfg)
    assert len(out) == 4
    steps = np.diff(out.states[:, :, 0], axis=1)
    np.testing.assert_array_equal(
        steps[:, :2], [[-1, -1], [-1, 1], [1, -1], [1, 1]]
    )
    # Final step is completed with the mean (0) at neutral weight 1.
    np.testing.assert_array_equal(steps[:, 2], np.zeros(4))
    np.testing.assert_array_equal(out.step_weights[:, 2], np.ones(4))
    np.testing.assert_allclose(out.raw_likeliness, np.full(4, 0.25), rtol=1e-12)


def test_tree_single_step_horizon_has_one_nominal_path():
    model = _lqg(1)
    out = sample_tree(model, [0.3], SamplerConfig(branch_factor=5))
    assert len(out) == 1
    assert out.raw_likeliness[0] == 1.0
    assert out.costs[0] == estimate_nbo(model, [0.3]).value


def test_shared_per_depth_reuses_draws_across_parents():
    cfg = SamplerConfig(
        branch_factor=2, noise_sharing=NoiseSharing.SHARED_PER_DEPTH, master_seed=9
    )
    out = sample_tree(_lqg(3), [0.5, 0.2, 0.1], cfg)
    w = out.step_weights
    # Depth-1 weights repeat the same two values across both parents.
    assert w[0, 1] == w[2, 1]
    assert w[1, 1] == w[3, 1]
    fresh = sample_tree(
        _lqg(3), [0.5, 0.2, 0.1], SamplerConfig(branch_factor=2, master_seed=9)
    )
    assert len(np.unique(fresh.step_weights[:, 1])) == 4


def test_sampled_likeliness_is_positive():
    for scheme_fn in (sample_tree, sample_independent):
        out = scheme_fn(_lqg(3), [0.5, 0.2, 0.1], SamplerConfig(branch_factor=4, master_seed=3))
        assert np.all(out.raw_likeliness > 0)


def test_tree_cap_error_suggests_alternatives():
    with pytest.raises(TreeSizeError, match="prune|independent"):
        sample_tree(_lqg(8), np.zeros(8), SamplerConfig(branch_factor=10))
    # Same size is fine when pruned.
    out = sample_tree_pruned(
        _lqg(8), np.zeros(8), SamplerConfig(branch_factor=10, prune_width=16)
    )
    assert len(out) == 16


def test_sample_tree_rejects_prune_width():
    with pytest.raises(ValueError):
        sample_tree(_lqg(2), [0.1, 0.2], SamplerConfig(branch_factor=2, prune_width=3))
    with pytest.raises(ValueError):
        sample_tree_pruned(_lqg(2), [0.1, 0.2], SamplerConfig(branch_factor=2))


def test_pruned_is_bit_identical_when_width_is_enough():
    controls = [0.5, 0.2, 0.1]
    for width in (9, 50):
        full = sample_tree(_lqg(3), controls, SamplerConfig(branch_factor=3, master_seed=21))
        pruned = sample_tree_pruned(
            _lqg(3),
            controls,
            SamplerConfig(branch_factor=3, prune_width=width, master_seed=21),
        )
        assert set_arrays_equal(full, pruned)
        assert np.array_equal(full.branch_paths, pruned.branch_paths)
        assert pruned.scheme is SamplingScheme.TREE_PRUNED


def test_pruned_count_is_min_of_width_and_tree_size():
    for width in (1, 2, 4, 9, 20):
        out = sample_tree_pruned(
            _lqg(3),
            [0.5, 0.2, 0.1],
            SamplerConfig(branch_factor=3, prune_width=width, master_seed=2),
        )
        assert len(out) == min(width, 9)


def test_pruned_survivors_match_rank_oracle():
    controls = [0.5, 0.2, 0.1, 0.3]
    full = sample_tree(_lqg(4), controls, SamplerConfig(branch_factor=2, master_seed=77))
    pruned, log = _sample_tree_pruned_logged(
        _lqg(4), controls, SamplerConfig(branch_factor=2, prune_width=3, master_seed=77)
    )
    assert len(pruned) == 3
    # Pruning happened at every depth whose pool exceeded the width.
    assert [rec.level for rec in log] == [1, 2]
    # At the first cut no earlier pruning has occurred, so the pool matches
    # the unpruned tree's partial likeliness and the survivors are its top 3.
    first = log[0]
    partial = np.prod(full.step_weights[:, :2][::2], axis=1)  # unique depth-2 prefixes
    pool = np.sort(first.likeliness)[::-1]
    np.testing.assert_allclose(np.sort(partial)[::-1][:4], pool[:4], rtol=1e-12)
    survivors = first.likeliness[first.kept]
    excluded = np.delete(first.likeliness, first.kept)
    assert survivors.min() >= excluded.max()


def test_pruning_dominance_at_every_cut():
    rng = np.random.default_rng(4)
    for seed in rng.integers(0, 2**32, size=8):
        _, log = _sample_tree_pruned_logged(
            _lqg(4),
            [0.5, 0.2, 0.1, 0.3],
            SamplerConfig(branch_factor=3, prune_width=5, master_seed=int(seed)),
        )
        assert log, "expected pruning to trigger"
        for rec in log:
            survivors = rec.likeliness[rec.kept]
            excluded = np.delete(rec.likeliness, rec.kept)
            assert survivors.min() >= excluded.max()


def test_pruned_single_path_follows_highest_weight_at_each_depth():
    out, log = _sample_tree_pruned_logged(
        _lqg(4),
        [0.5, 0.2, 0.1, 0.3],
        SamplerConfig(branch_factor=4, prune_width=1, master_seed=13),
    )
    assert len(out) == 1
    for rec in log:
        assert rec.kept[0] == int(np.argmax(rec.likeliness))


def test_pruned_ties_break_by_branch_digits():
    noise = CyclicNoise([-1.0, 1.0], [0.5, 0.5])
    model = accumulator_model(noise, horizon=3)
    out = sample_tree_pruned(
        model,
        np.zeros(3),
        SamplerConfig(
            branch_factor=2, prune_width=2, noise_sharing=NoiseSharing.SHARED_PER_DEPTH
        ),
    )
    # All four candidates tie at likeliness 0.25; lexicographic branch order wins.
    assert out.branch_paths.tolist() == [[0, 0], [0, 1]]


def test_independent_single_path():
    out = sample_independent(_lqg(2), [0.5, 0.2], SamplerConfig(branch_factor=1))
    assert len(out) == 1
    assert out.scheme is SamplingScheme.INDEPENDENT


def test_independent_zero_variance_collapses_to_nominal_path():
    model = lqg_stochastic_model(
        LqgParams(a=0.5, r=10.0, target=1.0, sigma=0.0, x0=0.0, horizon=2)
    )
    out = sample_independent(model, [0.55, 0.17], SamplerConfig(branch_factor=1000))
    nominal = estimate_nbo(model, [0.55, 0.17])
    assert np.all(out.costs == nominal.value)
    assert np.all(out.states == out.states[0])


def test_independent_draws_every_step_fresh():
    out = sample_independent(
        _lqg(3), [0.5, 0.2, 0.1], SamplerConfig(branch_factor=5, master_seed=8)
    )
    # No nominal completion here: all H step weights are genuine densities.
    assert np.all(out.step_weights < 1.0)
    assert len(np.unique(out.step_weights)) == 15


def test_independent_prefix_stability():
    small = sample_independent(_lqg(2), [0.5, 0.2], SamplerConfig(branch_factor=10, master_seed=6))
    large = sample_independent(_lqg(2), [0.5, 0.2], SamplerConfig(branch_factor=40, master_seed=6))
    assert np.array_equal(small.costs, large.costs[:10])
    assert np.array_equal(small.states, large.states[:10])


def test_independent_bit_identical_across_worker_counts():
    model = _loop_only_model()
    outs = [
        sample_independent(
            model,
            [0.55, 0.17],
            SamplerConfig(branch_factor=101, master_seed=5, workers=w),
        )
        for w in (1, 4)
    ]
    assert set_arrays_equal(outs[0], outs[1])


def test_loop_and_batch_paths_agree():
    loop = sample_independent(
        _loop_only_model(), [0.55, 0.17], SamplerConfig(branch_factor=64, master_seed=12)
    )
    fast = sample_independent(
        _lqg(2), [0.55, 0.17], SamplerConfig(branch_factor=64, master_seed=12)
    )
    np.testing.assert_allclose(loop.costs, fast.costs, rtol=1e-12)
    np.testing.assert_allclose(loop.states, fast.states, rtol=1e-12)


def test_samplers_are_deterministic_given_config():
    controls = [0.5, 0.2, 0.1]
    cfg = SamplerConfig(branch_factor=3, master_seed=99)
    cfg_pruned = SamplerConfig(branch_factor=3, prune_width=4, master_seed=99)
    for fn, config in (
        (sample_tree, cfg),
        (sample_tree_pruned, cfg_pruned),
        (sample_independent, cfg),
    ):
        first = fn(_lqg(3), controls, config)
        second = fn(_lqg(3), controls, config)
        assert set_arrays_equal(first, second)


def test_tree_and_pruned_share_streams_by_construction():
    # The unpruned tree and a never-triggered pruned tree must consume the
    # same draws; a triggered prune must still agree on the surviving rows.
    controls = [0.5, 0.2, 0.1]
    full = sample_tree(_lqg(3), controls, SamplerConfig(branch_factor=3, master_seed=31))
    pruned = sample_tree_pruned(
        _lqg(3), controls, SamplerConfig(branch_factor=3, prune_width=4, master_seed=31)
    )
    rank = likeliness_rank(full)[:4]
    np.testing.assert_array_equal(full.branch_paths[rank], pruned.branch_paths)
    np.testing.assert_array_equal(full.costs[rank], pruned.costs)


def test_independent_costs_are_uncorrelated():
    # Rank correlation between path slots over replications.  Ranks give a
    # statistic with a calibrated normal null (raw cost products are far too
    # heavy-tailed at this replication count), while any accidental draw
    # sharing between slots would push |z| into the tens.
    model = _lqg(2)
    reps = 4000
    n_paths = 6
    costs = np.empty((reps, n_paths))
    for rep in range(reps):
        out = sample_independent(
            model, [0.55, 0.17], SamplerConfig(branch_factor=n_paths, master_seed=rep)
        )
        costs[rep] = out.costs
    ranks = costs.argsort(axis=0).argsort(axis=0).astype(float)
    ranks -= ranks.mean(axis=0)
    ranks /= np.sqrt((ranks**2).sum(axis=0))
    worst = 0.0
    for i in range(n_paths):
        for j in range(i + 1, n_paths):
            z = abs(float(ranks[:, i] @ ranks[:, j])) * np.sqrt(reps - 1)
            worst = max(worst, z)
    assert worst < 3.5
