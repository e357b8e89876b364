"""Vehicle, target, and sensor models for the tracking case study.

A fixed-wing style vehicle moves in the plane under forward acceleration
and bank angle (coordinated turn: heading rate g tan(bank) / speed).  The
tracked object follows a near-constant-velocity model with white
acceleration noise.  An onboard position sensor reports the target with
isotropic noise whose variance grows with the vehicle-to-target range,
which is what couples vehicle motion to tracking quality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GRAVITY",
    "UavState",
    "UavControl",
    "uav_step",
    "target_transition_matrix",
    "target_process_cov",
    "target_step",
    "measurement_matrix",
    "sensor_cov",
    "sensor_measure",
]

GRAVITY = 9.81


@dataclass(frozen=True)
class UavState:
    """Planar vehicle state: position (m), heading (rad), speed (m/s)."""

    position: np.ndarray
    heading: float
    speed: float

    def __post_init__(self) -> None:
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (2,):
            raise ValueError(f"position must be a 2-vector, got shape {pos.shape}")
        pos = pos.copy()
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "heading", float(self.heading))
        object.__setattr__(self, "speed", float(self.speed))


@dataclass(frozen=True)
class UavControl:
    """Forward acceleration (m/s^2) and bank angle (rad)."""

    forward_acceleration: float
    bank_angle: float


def uav_step(
    state: UavState,
    control: UavControl,
    dt: float,
    v_min: float = 10.0,
    v_max: float = 50.0,
    gravity: float = GRAVITY,
) -> UavState:
    """Advance the vehicle one step (deterministic kinematics).

    Speed integrates the acceleration and is clamped to [v_min, v_max].
    Heading integrates the coordinated-turn rate gravity*tan(bank)/speed at
    the new speed, and the displacement uses the new heading, so a one-step
    plan already feels the turn.
    """
    speed = float(np.clip(state.speed + control.forward_acceleration * dt, v_min, v_max))
    heading = state.heading + gravity * np.tan(control.bank_angle) / speed * dt
    direction = np.array([np.cos(heading), np.sin(heading)])
    position = state.position + speed * direction * dt
    return UavState(position=position, heading=heading, speed=speed)


def target_transition_matrix(dt: float) -> np.ndarray:
    """Constant-velocity transition for the (px, py, vx, vy) state."""
    f = np.eye(4)
    f[0, 2] = dt
    f[1, 3] = dt
    return f


def target_process_cov(intensity: float, dt: float) -> np.ndarray:
    """White-acceleration process covariance for the constant-velocity model.

    ``intensity`` is the acceleration power spectral density q; the familiar
    block form has position variance q dt^3/3, velocity variance q dt and
    cross term q dt^2/2 per axis.
    """
    q3 = intensity * dt**3 / 3.0
    q2 = intensity * dt**2 / 2.0
    q1 = intensity * dt
    return np.array(
        [
            [q3, 0.0, q2, 0.0],
            [0.0, q3, 0.0, q2],
            [q2, 0.0, q1, 0.0],
            [0.0, q2, 0.0, q1],
        ]
    )


def target_step(state, dt: float, rng: np.random.Generator, intensity: float = 0.5):
    """Advance the true target state with sampled process noise."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    state = np.asarray(state, dtype=float)
    f = target_transition_matrix(dt)
    mean = f @ state
    if intensity == 0.0:
        return mean
    cov = target_process_cov(intensity, dt)
    root = np.linalg.cholesky(cov)
    return mean + root @ rng.standard_normal(4)


def measurement_matrix() -> np.ndarray:
    """Position-only observation of the 4-dimensional target state."""
    h = np.zeros((2, 4))
    h[0, 0] = 1.0
    h[1, 1] = 1.0
    return h


def sensor_cov(uav_position, target_position, sigma0: float, eta: float) -> np.ndarray:
    """Measurement covariance (sigma0^2 + eta * range^2) * I."""
    delta = np.asarray(target_position, dtype=float) - np.asarray(uav_position, dtype=float)
    range_sq = float(delta @ delta)
    return (sigma0**2 + eta * range_sq) * np.eye(2)


def sensor_measure(
    uav: UavState,
    target_pos,
    rng: np.random.Generator,
    sigma0: float = 5.0,
    eta: float = 1e-3,
):
    """Noisy target position and the covariance of the noise that was used.

    The noise is isotropic with standard deviation sqrt(sigma0^2 + eta r^2)
    where r is the current vehicle-to-target range.
    """
    target_pos = np.asarray(target_pos, dtype=float)
    cov = sensor_cov(uav.position, target_pos, sigma0, eta)
    std = np.sqrt(cov[0, 0])
    measurement = target_pos + std * rng.standard_normal(2)
    return measurement, cov
