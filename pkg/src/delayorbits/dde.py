"""Method-of-steps integration of the delay equation, used as an independent check.

The collocation solver never sees this module.  A history on ``[-tau, 0]``
is sampled from a computed orbit, the delay equation is integrated forward
with classical RK4, and the delayed state is read from the stored
trajectory by cubic Hermite interpolation on the integrator nodes.  Since
``tau >= h``, every delayed lookup falls at or before the current node, so
each step only needs values that are already known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegratorBlowup, MinDelayTooSmall
from .fields import DelayCoefficientField

__all__ = [
    "HistorySegment",
    "Trajectory",
    "integrate_mos",
    "periodicity_residual",
    "MIN_SAMPLES_PER_UNIT",
    "MAX_DURATION",
]

MIN_SAMPLES_PER_UNIT = 16
MAX_DURATION = 4.0
BLOWUP = 1e12


@dataclass(frozen=True)
class HistorySegment:
    """Values and derivatives of the past on the uniform grid ``t_i = i h``, ``i = -J..0``.

    ``J = ceil(tau / h)``, so the grid covers ``[-tau, 0]`` (and at most one
    extra step before ``-tau``).
    """

    tau: float
    step: float
    values: np.ndarray       # (n, J + 1)
    derivatives: np.ndarray  # (n, J + 1)

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"history delay must lie in [0, 1], got {self.tau}")
        if self.step <= 0 or 1.0 / self.step < MIN_SAMPLES_PER_UNIT - 1e-9:
            raise ValueError(f"need at least {MIN_SAMPLES_PER_UNIT} samples per unit time")

    @property
    def dim(self):
        return self.values.shape[0]

    @classmethod
    def from_orbit(cls, x, tau, steps_per_unit=4096):
        """Sample a PeriodicMap and its derivative on ``[-tau, 0]`` from the trigonometric series."""
        h = 1.0 / steps_per_unit
        J = int(math.ceil(tau / h - 1e-9))
        t = h * np.arange(-J, 1)
        return cls(float(tau), h, x(t).reshape(x.dim, -1), x.derivative()(t).reshape(x.dim, -1))

    @classmethod
    def constant(cls, value, tau, steps_per_unit=4096):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        h = 1.0 / steps_per_unit
        J = int(math.ceil(tau / h - 1e-9))
        vals = np.repeat(value[:, None], J + 1, axis=1)
        return cls(float(tau), h, vals, np.zeros_like(vals))


@dataclass(frozen=True)
class Trajectory:
    """Solution on ``t_i = i h`` for ``i = 0..S``, with derivatives at the nodes."""

    times: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray


def _rhs(field, t, y, yd):
    if isinstance(field, DelayCoefficientField):
        return field.coeff(t, yd) * field.base.evaluate(t, y)
    return field.evaluate(t, yd)


def integrate_mos(field, history, duration=1.0, steps_per_unit=None):
    """Integrate ``x' = X_t(x(t - tau))`` (or the coefficient form) from ``history``.

    Parameters
    ----------
    field : VectorFieldSpec or DelayCoefficientField
    history : HistorySegment
    duration : float
        At most 4 time units.
    steps_per_unit : int, optional
        Must match the history resolution when given.

    Returns
    -------
    Trajectory

    Raises
    ------
    MinDelayTooSmall
        When ``tau`` is below one integrator step.
    IntegratorBlowup
        When the state becomes non-finite or exceeds 1e12 in norm.
    """
    h = history.step
    if steps_per_unit is not None and abs(1.0 / steps_per_unit - h) > 1e-15:
        raise ValueError("steps_per_unit differs from the history resolution")
    if not 0.0 < duration <= MAX_DURATION:
        raise ValueError(f"duration must lie in (0, {MAX_DURATION}]")
    tau = history.tau
    if tau < h * (1.0 - 1e-9):
        raise MinDelayTooSmall(f"delay {tau:.3g} is below the integrator step {h:.3g}")
    if history.dim != field.dim:
        raise ValueError(f"history has dim {history.dim}, field has dim {field.dim}")
    n = field.dim
    J = history.values.shape[1] - 1
    S = int(round(duration / h))
    vals = np.empty((n, J + S + 1))
    ders = np.empty((n, J + S + 1))
    vals[:, :J + 1] = history.values
    ders[:, :J + 1] = history.derivatives
    t_first = -J * h

    def delayed(s):
        u = (s - tau - t_first) / h
        i = int(math.floor(u + 1e-9))
        th = u - i
        if th < 1e-9:
            return vals[:, i]
        th2, th3 = th * th, th * th * th
        return ((2 * th3 - 3 * th2 + 1) * vals[:, i] + (th3 - 2 * th2 + th) * h * ders[:, i]
                + (-2 * th3 + 3 * th2) * vals[:, i + 1] + (th3 - th2) * h * ders[:, i + 1])

    y = vals[:, J].copy()
    # the node derivative at t=0 is the equation's own right-hand side
    ders[:, J] = _rhs(field, 0.0, y, delayed(0.0))
    for j in range(S):
        t = j * h
        d_half = delayed(t + 0.5 * h)
        k1 = ders[:, J + j]
        k2 = _rhs(field, t + 0.5 * h, y + 0.5 * h * k1, d_half)
        k3 = _rhs(field, t + 0.5 * h, y + 0.5 * h * k2, d_half)
        d_end = delayed(t + h)
        k4 = _rhs(field, t + h, y + h * k3, d_end)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.linalg.norm(y) > BLOWUP:
            raise IntegratorBlowup(f"method of steps blew up at t={t + h:.6g}")
        vals[:, J + j + 1] = y
        ders[:, J + j + 1] = _rhs(field, t + h, y, d_end)
    times = h * np.arange(S + 1)
    return Trajectory(times, vals[:, J:].copy(), ders[:, J:].copy())


def periodicity_residual(field, x, tau, steps_per_unit=4096):
    """Max-over-nodes ``|trajectory(t) - x(t)|`` after integrating one period from ``x``'s own past."""
    history = HistorySegment.from_orbit(x, tau, steps_per_unit)
    traj = integrate_mos(field, history, 1.0)
    ref = x(traj.times).reshape(x.dim, -1)
    return float(np.max(np.linalg.norm(traj.values - ref, axis=0)))
