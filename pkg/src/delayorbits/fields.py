"""Time-dependent vector fields ``X: S^1 x R^n -> R^n`` and their Jacobians.

Callbacks are vectorized over sample points: ``eval(t, y)`` receives either a
scalar ``t`` with ``y`` of shape (n,), or ``t`` of shape (M,) with ``y`` of
shape (n, M), and returns an array shaped like ``y``.  ``jac(t, y)`` returns
(n, n) or (n, n, M) accordingly.  Time is reduced modulo 1 before the
callbacks see it, so every field is 1-periodic by construction.

Nonlinear composition ``t -> X_t(x(t))`` is carried out on a zero-padded
grid of ``dealiased_size(K)`` nodes and truncated back to ``K``; quadratic
fields are therefore evaluated without aliasing error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, JacobianMismatch
from .fourier import PeriodicMap, dealiased_size, grid

__all__ = [
    "VectorFieldSpec",
    "LinearAffineField",
    "DelayCoefficientField",
    "JacobianReport",
    "zero_field",
    "linear_affine",
    "autonomous_linear",
    "logistic",
    "forced_rotation",
    "limit_cycle",
    "delay_coefficient_logistic",
    "from_pointwise",
    "eval_on_orbit",
    "jacobian_on_orbit",
    "self_test_jacobian",
    "as_ode_field",
]

FAMILIES = ("LinearAffine", "PolynomialPeriodic", "Custom")


def _wrap(t):
    return np.mod(t, 1.0)


def _is_batch(t):
    return np.ndim(t) > 0


class VectorFieldSpec:
    """A time-dependent vector field with its spatial Jacobian.

    Parameters
    ----------
    dim : int
    eval, jac : callable
        Vectorized callbacks, see the module docstring.
    family_tag : {"LinearAffine", "PolynomialPeriodic", "Custom"}
    hamiltonian : bool
        User flag; Floquet reports then include ``||Y(1) - Z(1)||``.
    name : str, optional
    """

    def __init__(self, dim, eval, jac, family_tag="Custom", hamiltonian=False, name=None):
        if family_tag not in FAMILIES:
            raise ValueError(f"unknown family_tag {family_tag!r}")
        self.dim = int(dim)
        self._eval = eval
        self._jac = jac
        self.family_tag = family_tag
        self.hamiltonian = bool(hamiltonian)
        self.name = name or family_tag

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, name={self.name!r})"

    def evaluate(self, t, y):
        return np.asarray(self._eval(_wrap(t), np.asarray(y, dtype=float)), dtype=float)

    def jacobian(self, t, y):
        return np.asarray(self._jac(_wrap(t), np.asarray(y, dtype=float)), dtype=float)

    __call__ = evaluate


class LinearAffineField(VectorFieldSpec):
    """``X_t(y) = B y + b(t)`` with constant ``B`` and periodic forcing ``b``."""

    def __init__(self, a_matrix, forcing=None, name=None):
        B = np.atleast_2d(np.asarray(a_matrix, dtype=float))
        n = B.shape[0]
        if B.shape != (n, n):
            raise DimensionMismatch(f"a_matrix must be square, got {B.shape}")
        if forcing is None:
            forcing = PeriodicMap.zeros(n, K=1)
        if forcing.dim != n:
            raise DimensionMismatch(f"forcing has dim {forcing.dim}, matrix has {n}")
        self.a_matrix = B
        self.forcing = forcing

        def f(t, y):
            return B @ y + forcing(t)

        def df(t, y):
            if _is_batch(t):
                return np.broadcast_to(B[:, :, None], (n, n, np.size(t))).copy()
            return B.copy()

        super().__init__(n, f, df, family_tag="LinearAffine", name=name or "linear_affine")


class DelayCoefficientField:
    """Right-hand side ``f_t(x(t - tau)) * X_t(x(t))`` with scalar coefficient ``f``.

    ``coeff(t, y)`` returns shape () or (M,); ``coeff_grad(t, y)`` returns the
    gradient with the shape of ``y``.
    """

    def __init__(self, base, coeff, coeff_grad, name=None):
        self.base = base
        self.dim = base.dim
        self._coeff = coeff
        self._coeff_grad = coeff_grad
        self.family_tag = base.family_tag
        self.hamiltonian = False
        self.name = name or f"delay_coefficient[{base.name}]"

    def __repr__(self):
        return f"DelayCoefficientField(dim={self.dim}, name={self.name!r})"

    def coeff(self, t, y):
        return np.asarray(self._coeff(_wrap(t), np.asarray(y, dtype=float)), dtype=float)

    def coeff_grad(self, t, y):
        return np.asarray(self._coeff_grad(_wrap(t), np.asarray(y, dtype=float)), dtype=float)

    def combined(self):
        """The undelayed vector field ``f X`` (the tau = 0 problem)."""
        base = self.base

        def f(t, y):
            return self.coeff(t, y) * base.evaluate(t, y)

        def df(t, y):
            J = base.jacobian(t, y)
            c = self.coeff(t, y)
            X = base.evaluate(t, y)
            g = self.coeff_grad(t, y)
            return c * J + X[:, None] * g[None, :]

        return VectorFieldSpec(self.dim, f, df, family_tag="Custom", name=f"combined[{self.name}]")


def as_ode_field(field):
    """Undelayed vector field whose periodic orbits seed the delay problem."""
    if isinstance(field, DelayCoefficientField):
        return field.combined()
    return field


# -- built-in families --------------------------------------------------------

def zero_field(dim=1):
    def f(t, y):
        return np.zeros_like(y)

    def df(t, y):
        shape = (dim, dim, np.size(t)) if _is_batch(t) else (dim, dim)
        return np.zeros(shape)

    return VectorFieldSpec(dim, f, df, family_tag="LinearAffine", name="zero")


def linear_affine(a_matrix, forcing=None):
    return LinearAffineField(a_matrix, forcing)


def autonomous_linear(a_matrix):
    """``X(y) = B y``; the origin is a fixed point for every delay."""
    return LinearAffineField(a_matrix, None, name="autonomous_linear")


def logistic(a=1.5, c=1.0):
    """Scalar ``X_t(y) = a y (1 - y) + c cos(2 pi t)``."""

    def f(t, y):
        return a * y * (1.0 - y) + c * np.cos(2.0 * np.pi * t)

    def df(t, y):
        d = a * (1.0 - 2.0 * y)
        return d[None, :, :] if _is_batch(t) else d[None, :]

    return VectorFieldSpec(1, f, df, family_tag="PolynomialPeriodic", name="logistic")


def forced_rotation(a_matrix=None, epsilon=1.0):
    """Planar ``X_t(y) = B y + epsilon (cos 2 pi t, sin 2 pi t)`` with ``B`` invertible."""
    if a_matrix is None:
        w = 2.0 * np.pi * 0.3
        a_matrix = [[-0.5, -w], [w, -0.5]]
    forcing = PeriodicMap.from_modes({1: [0.5 * epsilon, -0.5j * epsilon]}, dim=2, K=1)
    field = LinearAffineField(a_matrix, forcing, name="forced_rotation")
    return field


def limit_cycle(omega=2.0 * np.pi):
    """Autonomous ``X(y) = omega J y + (1 - |y|^2) y``; unit circle is a period-1 orbit."""

    def f(t, y):
        r2 = y[0] ** 2 + y[1] ** 2
        g = 1.0 - r2
        return np.stack([-omega * y[1] + g * y[0], omega * y[0] + g * y[1]])

    def df(t, y):
        x0, x1 = y[0], y[1]
        g = 1.0 - x0 ** 2 - x1 ** 2
        return np.array([
            [g - 2.0 * x0 ** 2, -omega - 2.0 * x0 * x1],
            [omega - 2.0 * x0 * x1, g - 2.0 * x1 ** 2],
        ])

    return VectorFieldSpec(2, f, df, family_tag="PolynomialPeriodic", name="limit_cycle")


def delay_coefficient_logistic(a=-1.0, c=1.0, beta=0.5):
    """Scalar ``x' = (1 + beta x(t - tau)^2) * (a x + c cos 2 pi t)``."""
    forcing = PeriodicMap.from_modes({1: 0.5 * c}, dim=1, K=1)
    base = LinearAffineField([[a]], forcing, name="linear_affine")

    def coeff(t, y):
        return 1.0 + beta * y[0] ** 2

    def coeff_grad(t, y):
        return 2.0 * beta * y

    return DelayCoefficientField(base, coeff, coeff_grad, name="delay_coefficient_logistic")


def from_pointwise(dim, func, jac, family_tag="Custom", hamiltonian=False, name=None):
    """Wrap non-vectorized callbacks ``func(t, y) -> (n,)`` and ``jac(t, y) -> (n, n)``."""

    def f(t, y):
        if _is_batch(t):
            return np.stack([np.asarray(func(ti, y[:, i]), dtype=float)
                             for i, ti in enumerate(t)], axis=1)
        return np.asarray(func(t, y), dtype=float)

    def df(t, y):
        if _is_batch(t):
            return np.stack([np.asarray(jac(ti, y[:, i]), dtype=float)
                             for i, ti in enumerate(t)], axis=2)
        return np.asarray(jac(t, y), dtype=float)

    return VectorFieldSpec(dim, f, df, family_tag=family_tag, hamiltonian=hamiltonian, name=name)


# -- operations on orbits -----------------------------------------------------

def _check_dim(field, x):
    if field.dim != x.dim:
        raise DimensionMismatch(f"field has dim {field.dim}, map has dim {x.dim}")


def eval_on_orbit(field, x):
    """``t -> X_t(x(t))`` as a PeriodicMap with the truncation of ``x``."""
    _check_dim(field, x)
    M = dealiased_size(x.K)
    values = field.evaluate(grid(M), x.to_samples(M))
    return PeriodicMap.from_samples(values).resize(x.K)


def jacobian_on_orbit(field, x, M=None):
    """``dX_t(x(t))`` at the nodes ``i/M`` (default: the collocation grid); shape (n, n, M)."""
    _check_dim(field, x)
    M = x.grid_size if M is None else M
    return field.jacobian(grid(M), x.to_samples(M))


@dataclass(frozen=True)
class JacobianReport:
    max_mismatch: float
    probes: int
    passed: bool


def _fd_jacobian(func, t, y, step):
    n = y.size
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        cols.append((func(t, y + e) - func(t, y - e)) / (2.0 * step))
    return np.stack(cols, axis=-1)


def self_test_jacobian(field, probes=100, rng=None, step=1e-5, tol=1e-5, scale=1.0):
    """Compare the Jacobian callback with central differences at random points.

    The mismatch at a probe is ``||J - J_fd|| / max(||J||, ||J_fd||, 1)``.
    Raises :class:`JacobianMismatch` when the worst probe exceeds ``tol``.
    For a :class:`DelayCoefficientField` both the base Jacobian and the
    coefficient gradient are checked.
    """
    rng = np.random.default_rng(rng)
    n = field.dim
    worst = 0.0
    for _ in range(probes):
        t = float(rng.uniform(0.0, 1.0))
        y = scale * rng.standard_normal(n)
        pairs = []
        if isinstance(field, DelayCoefficientField):
            pairs.append((field.base.jacobian(t, y), _fd_jacobian(field.base.evaluate, t, y, step)))
            g = field.coeff_grad(t, y)[None, :]
            g_fd = _fd_jacobian(lambda s, z: np.atleast_1d(field.coeff(s, z)), t, y, step)
            pairs.append((g, g_fd))
        else:
            pairs.append((field.jacobian(t, y), _fd_jacobian(field.evaluate, t, y, step)))
        for J, J_fd in pairs:
            denom = max(np.linalg.norm(J), np.linalg.norm(J_fd), 1.0)
            worst = max(worst, float(np.linalg.norm(J - J_fd) / denom))
    report = JacobianReport(worst, probes, worst <= tol)
    if not report.passed:
        raise JacobianMismatch(f"{field.name}: Jacobian mismatch {worst:.3e} > {tol:.1e}")
    return report
