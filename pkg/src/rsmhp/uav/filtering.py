"""Kalman filtering of the constant-velocity target.

Single-belief predict/update operate on a TargetBelief; the module also
keeps vectorized twins that carry a stack of covariances (and optionally
means) through the same recursion, used by the planner to push many
sampled futures at once.  Updates use the Joseph form and re-symmetrize,
so covariances stay symmetric and cannot go indefinite from rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import measurement_matrix, target_process_cov, target_transition_matrix

__all__ = [
    "TargetBelief",
    "kalman_predict",
    "kalman_update",
]

_EIG_TOL = -1e-9


@dataclass(frozen=True)
class TargetBelief:
    """Gaussian belief over the target state (px, py, vx, vy)."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if mean.shape != (4,):
            raise ValueError(f"mean must be a 4-vector, got shape {mean.shape}")
        if cov.shape != (4, 4):
            raise ValueError(f"covariance must be 4x4, got shape {cov.shape}")
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise ValueError("covariance must be symmetric within 1e-9")
        eigs = np.linalg.eigvalsh(cov)
        if eigs.min() < _EIG_TOL * max(1.0, abs(eigs.max())):
            raise ValueError(f"covariance must be positive semidefinite, eigs {eigs}")
        mean = mean.copy()
        cov = cov.copy()
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def position(self) -> np.ndarray:
        return self.mean[:2]


def kalman_predict(belief: TargetBelief, dt: float, intensity: float = 0.5) -> TargetBelief:
    """Time update: constant-velocity transition plus process noise."""
    f = target_transition_matrix(dt)
    q = target_process_cov(intensity, dt)
    mean = f @ belief.mean
    cov = f @ belief.covariance @ f.T + q
    return TargetBelief(mean=mean, covariance=0.5 * (cov + cov.T))


def kalman_update(belief: TargetBelief, measurement, noise_cov) -> TargetBelief:
    """Measurement update with a position observation (Joseph form)."""
    measurement = np.asarray(measurement, dtype=float)
    noise_cov = np.asarray(noise_cov, dtype=float)
    h = measurement_matrix()
    p = belief.covariance
    innovation_cov = h @ p @ h.T + noise_cov
    det = innovation_cov[0, 0] * innovation_cov[1, 1] - innovation_cov[0, 1] ** 2
    if not np.isfinite(det) or det <= 0.0:
        raise np.linalg.LinAlgError(
            f"innovation covariance is not invertible (det {det})"
        )
    gain = p @ h.T @ np.linalg.inv(innovation_cov)
    mean = belief.mean + gain @ (measurement - h @ belief.mean)
    closed = np.eye(4) - gain @ h
    cov = closed @ p @ closed.T + gain @ noise_cov @ gain.T
    return TargetBelief(mean=mean, covariance=0.5 * (cov + cov.T))


def _batch_predict(means, covs, f, q):
    """Vectorized time update for stacked means (n, 4) and covariances (n, 4, 4).

    The result of f P f' + q is symmetric up to rounding whenever P is; the
    update step re-symmetrizes, so no extra pass is spent here.
    """
    return means @ f.T, f @ covs @ f.T + q


def _joseph_cov_update(covs, noise_vars):
    """Joseph-form covariance update for a position observation.

    ``noise_vars`` is (n,) since the sensor noise is isotropic; the 2x2
    innovation covariance is inverted in closed form.  Returns the gains
    (n, 4, 2) and the updated, re-symmetrized covariances.
    """
    s00 = covs[:, 0, 0] + noise_vars
    s01 = covs[:, 0, 1]
    s11 = covs[:, 1, 1] + noise_vars
    det = s00 * s11 - s01 * s01
    inv = np.empty(covs.shape[:1] + (2, 2))
    inv[:, 0, 0] = s11 / det
    inv[:, 0, 1] = -s01 / det
    inv[:, 1, 0] = inv[:, 0, 1]
    inv[:, 1, 1] = s00 / det
    # Gain K = P H' S^{-1}: columns 0..1 of P times the 2x2 inverse.
    gain = covs[:, :, :2] @ inv
    closed = np.broadcast_to(np.eye(4), covs.shape).copy()
    closed[:, :, :2] -= gain
    covs = closed @ covs @ closed.swapaxes(-1, -2)
    covs = covs + (gain * noise_vars[:, None, None]) @ gain.swapaxes(-1, -2)
    return gain, 0.5 * (covs + np.swapaxes(covs, -1, -2))


def _batch_update(means, covs, measurements, noise_vars):
    """Vectorized position update: Joseph covariance step plus the mean shift."""
    gain, covs = _joseph_cov_update(covs, noise_vars)
    innovation = measurements - means[:, :2]
    means = means + (gain @ innovation[:, :, None])[:, :, 0]
    return means, covs
