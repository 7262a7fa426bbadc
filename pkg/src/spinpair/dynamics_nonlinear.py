"""Mean-value precession whose frequency depends on the state it evolves.

The system spin precesses about axis 3 at angular frequency 2*epsilon*s3:
the third Bloch component is conserved and sets the rate at which the first
two rotate. Because the rate is itself a mean value, evolving a mixture's
aggregate Bloch vector and evolving each pure branch separately are
genuinely different operations; EvolutionPolicy makes that choice explicit
instead of guessing. There is no defined rule here for evolving an
entangled branch on its own, so BRANCH_MEANS refuses entangled branches
with NotProductError.

The closed form is the production path. integrate_rk4 exists purely as an
independent check: it consumes only the right-hand side, never the closed
form, and the two must agree to tight tolerance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .states import BlochVector, Ensemble, branch_bloch, reduced_bloch

RateFn = Callable[[BlochVector], float]


class EvolutionPolicy(enum.Enum):
    """How an ensemble's Bloch trajectory is computed."""

    AGGREGATE_MEANS = "aggregate-means"
    BRANCH_MEANS = "branch-means"


def mean_field_rate(epsilon: float) -> RateFn:
    """Precession frequency set by the state itself: 2 * epsilon * s3."""
    eps = float(epsilon)

    def rate(b: BlochVector) -> float:
        return 2.0 * eps * b.s3

    return rate


def fixed_rate(omega: float) -> RateFn:
    """State-independent precession frequency: the linear contrast case."""
    w = float(omega)

    def rate(_: BlochVector) -> float:
        return w

    return rate


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time grid plus the Bloch vector at each grid point."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-d array")
        if points.shape != (times.size, 3):
            raise ValueError(
                f"points must have shape ({times.size}, 3), got {points.shape}"
            )
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(points))):
            raise ValueError("trajectory contains non-finite values")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        times = times.copy()
        times.setflags(write=False)
        points = points.copy()
        points.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def sigma1(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def sigma2(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def sigma3(self) -> np.ndarray:
        return self.points[:, 2]

    def bloch(self, index: int) -> BlochVector:
        return BlochVector(*self.points[index])


def _as_bloch(value) -> BlochVector:
    if isinstance(value, BlochVector):
        return value
    return BlochVector(*value)


def eom_rhs(bloch, epsilon: float) -> np.ndarray:
    """Time derivative of the mean values: (-2*eps*s3*s2, 2*eps*s3*s1, 0)."""
    s1, s2, s3 = (float(c) for c in bloch)
    eps = float(epsilon)
    return np.array([-2.0 * eps * s3 * s2, 2.0 * eps * s3 * s1, 0.0])


def closed_form(b0, epsilon: float, t: float) -> BlochVector:
    """Exact solution: s3 constant, (s1, s2) rotated by the angle 2*eps*s3*t."""
    b0 = _as_bloch(b0)
    angle = mean_field_rate(epsilon)(b0) * float(t)
    c = float(np.cos(angle))
    s = float(np.sin(angle))
    return BlochVector(b0.s1 * c - b0.s2 * s, b0.s2 * c + b0.s1 * s, b0.s3)


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid of spacing dt from 0 to exactly t_max, last step shortened."""
    t_max = float(t_max)
    dt = float(dt)
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t_max < 0.0:
        raise ValueError(f"t_max must be nonnegative, got {t_max!r}")
    if t_max == 0.0:
        return np.zeros(1)
    if dt > t_max:
        raise ValueError(f"dt ({dt!r}) must not exceed t_max ({t_max!r})")
    count = int(np.floor(t_max / dt + 1e-9))
    times = dt * np.arange(count + 1, dtype=float)
    if times[-1] >= t_max - 1e-9 * dt:
        times[-1] = t_max
    else:
        times = np.append(times, t_max)
    return times


def integrate_rk4(b0, epsilon: float, t_max: float, dt: float) -> Trajectory:
    """Classical fourth-order Runge-Kutta on the mean-value equations.

    Consumes only eom_rhs; serves as the independent check on closed_form.
    """
    b0 = _as_bloch(b0)
    times = time_grid(t_max, dt)
    points = np.empty((times.size, 3))
    y = b0.as_array()
    points[0] = y
    for i in range(times.size - 1):
        h = times[i + 1] - times[i]
        k1 = eom_rhs(y, epsilon)
        k2 = eom_rhs(y + 0.5 * h * k1, epsilon)
        k3 = eom_rhs(y + 0.5 * h * k2, epsilon)
        k4 = eom_rhs(y + h * k3, epsilon)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        points[i + 1] = y
    return Trajectory(times, points)


def _rotation_points(b0: BlochVector, omega: float, times: np.ndarray) -> np.ndarray:
    angles = float(omega) * times
    c = np.cos(angles)
    s = np.sin(angles)
    points = np.empty((times.size, 3))
    points[:, 0] = b0.s1 * c - b0.s2 * s
    points[:, 1] = b0.s2 * c + b0.s1 * s
    points[:, 2] = b0.s3
    return points


def evolve_ensemble(
    ensemble: Ensemble,
    policy: EvolutionPolicy,
    epsilon: float,
    times,
    rate_fn: RateFn | None = None,
) -> Trajectory:
    """Bloch trajectory of the system spin under the chosen evolution policy.

    AGGREGATE_MEANS evolves the ensemble's reduced Bloch vector as one
    initial condition. BRANCH_MEANS evolves every branch's own Bloch vector
    and weight-averages the results at each time; it requires every branch
    to be a product state.

    rate_fn overrides the precession law; passing fixed_rate(omega) restores
    a state-independent (linear) precession under which the two policies
    cannot be told apart.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("time grid must not be empty")
    rate = rate_fn if rate_fn is not None else mean_field_rate(epsilon)
    if policy is EvolutionPolicy.AGGREGATE_MEANS:
        b0 = reduced_bloch(ensemble)
        points = _rotation_points(b0, rate(b0), times)
    elif policy is EvolutionPolicy.BRANCH_MEANS:
        points = np.zeros((times.size, 3))
        for branch in ensemble.branches:
            b = branch_bloch(branch)
            points += branch.weight * _rotation_points(b, rate(b), times)
    else:
        raise ValueError(f"unknown evolution policy {policy!r}")
    return Trajectory(times, points)
