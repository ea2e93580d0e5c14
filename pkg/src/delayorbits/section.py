"""The section ``s(tau, x)`` whose zeros are periodic delay orbits, and its linearization.

Two forms are supported:

``PlainDelay``
    ``s(tau, x) = x' - X(shift(x, tau))`` for a :class:`VectorFieldSpec`.
``DelayCoefficient``
    ``s(tau, x) = x' - f(shift(x, tau)) * X(x)`` for a
    :class:`DelayCoefficientField`.  The linearization uses the flat
    connection of R^n, i.e. covariant derivatives are plain derivatives.

All nonlinear products are formed on the dealiased grid and projected back
to the truncation ``K`` of the problem.  Jacobian matrices act on the real
coefficient basis described in :mod:`delayorbits.fourier`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch
from .fields import DelayCoefficientField
from .fourier import (
    DEFAULT_K,
    PeriodicMap,
    analysis_matrix,
    dealiased_size,
    derivative_matrix,
    grid,
    shift_matrix,
    synthesis_matrix,
)

__all__ = [
    "SectionProblem",
    "TangentVector",
    "IndexReport",
    "residual",
    "linearize",
    "assemble_jacobian_x",
    "tau_derivative",
    "index_diagnostic",
    "spectral_tail_ratio",
    "KERNEL_THRESHOLD",
]

KERNEL_THRESHOLD = 1e-8


class SectionProblem:
    """A vector field together with the truncation used to discretize it."""

    def __init__(self, field, K=DEFAULT_K):
        if K < 4:
            raise ValueError(f"truncation K must be at least 4, got {K}")
        self.field = field
        self.K = int(K)

    @property
    def form(self):
        return "DelayCoefficient" if isinstance(self.field, DelayCoefficientField) else "PlainDelay"

    @property
    def dim(self):
        return self.field.dim

    @property
    def size(self):
        """Number of real unknowns ``n * (2K + 1)``."""
        return self.dim * (2 * self.K + 1)

    @cached_property
    def _fine_grid(self):
        return grid(dealiased_size(self.K))

    @cached_property
    def _analysis(self):
        return analysis_matrix(self.K, dealiased_size(self.K))

    @cached_property
    def _synthesis(self):
        return synthesis_matrix(self.K, self._fine_grid)

    def __repr__(self):
        return f"SectionProblem({self.field!r}, K={self.K}, form={self.form})"

    # -- helpers ------------------------------------------------------------

    def check(self, x):
        if x.dim != self.dim:
            raise DimensionMismatch(f"problem has dim {self.dim}, map has dim {x.dim}")
        if x.K != self.K:
            raise DimensionMismatch(f"problem has K={self.K}, map has K={x.K}")

    def samples(self, x):
        return x.to_samples(self._fine_grid.size)

    def project(self, values):
        """Dealiased samples -> PeriodicMap truncated to ``K``."""
        return PeriodicMap.from_samples(values).resize(self.K)


@dataclass(frozen=True)
class TangentVector:
    """A direction ``(T, xhat)`` in ``R x H^1``."""

    dtau: float
    dx: PeriodicMap


def residual(p, tau, x):
    """``x' - X(shift(x, tau))`` or ``x' - f(shift(x, tau)) X(x)``."""
    p.check(x)
    t = p._fine_grid
    delayed = p.samples(x.shift(tau))
    if p.form == "PlainDelay":
        rhs = p.field.evaluate(t, delayed)
    else:
        rhs = p.field.coeff(t, delayed) * p.field.base.evaluate(t, p.samples(x))
    return x.derivative() - p.project(rhs)


def linearize(p, tau, x, v):
    """Vertical differential ``ds(tau, x)`` applied to ``v = (T, xhat)``."""
    p.check(x)
    p.check(v.dx)
    t = p._fine_grid
    delayed = p.samples(x.shift(tau))
    # d/d(tau, x) of shift(x, tau) in direction (T, xhat)
    moved = p.samples(v.dx.shift(tau) - v.dtau * x.derivative().shift(tau))
    if p.form == "PlainDelay":
        J = p.field.jacobian(t, delayed)
        inner = np.einsum("ijm,jm->im", J, moved)
    else:
        base = p.field.base
        here = p.samples(x)
        coeff = p.field.coeff(t, delayed)
        grad = p.field.coeff_grad(t, delayed)
        J = base.jacobian(t, here)
        inner = (coeff * np.einsum("ijm,jm->im", J, p.samples(v.dx))
                 + np.sum(grad * moved, axis=0) * base.evaluate(t, here))
    return v.dx.derivative() - p.project(inner)


def tau_derivative(p, tau, x):
    """Partial derivative of the section in ``tau`` (the column ``linearize(1, 0)``)."""
    p.check(x)
    t = p._fine_grid
    delayed = p.samples(x.shift(tau))
    moved = p.samples(x.derivative().shift(tau))
    if p.form == "PlainDelay":
        inner = np.einsum("ijm,jm->im", p.field.jacobian(t, delayed), moved)
    else:
        base = p.field.base
        grad = p.field.coeff_grad(t, delayed)
        inner = np.sum(grad * moved, axis=0) * base.evaluate(t, p.samples(x))
    return p.project(inner)


def assemble_jacobian_x(p, tau, x):
    """Dense matrix of ``xhat -> ds(tau, x)(0, xhat)`` in the real coefficient basis."""
    p.check(x)
    n, K = p.dim, p.K
    N = 2 * K + 1
    t = p._fine_grid
    Syn, Ana = p._synthesis, p._analysis
    G = Syn @ shift_matrix(K, tau)
    delayed = p.samples(x.shift(tau))
    if p.form == "PlainDelay":
        J = p.field.jacobian(t, delayed)
        blocks = np.einsum("pm,ijm,mq->ijpq", Ana, J, G)
    else:
        base = p.field.base
        here = p.samples(x)
        W = p.field.coeff(t, delayed) * base.jacobian(t, here)
        C = base.evaluate(t, here)[:, None, :] * p.field.coeff_grad(t, delayed)[None, :, :]
        blocks = (np.einsum("pm,ijm,mq->ijpq", Ana, W, Syn)
                  + np.einsum("pm,ijm,mq->ijpq", Ana, C, G))
    blocks = -blocks
    D = derivative_matrix(K)
    for i in range(n):
        blocks[i, i] += D
    return blocks.transpose(0, 2, 1, 3).reshape(n * N, n * N)


@dataclass(frozen=True)
class IndexReport:
    kernel_dim_full: int
    kernel_dim_x_only: int
    smallest_singular_values: tuple
    sigma_max: float
    kernel_tau_component: float | None
    kernel_vector: np.ndarray | None

    def as_dict(self):
        return {
            "kernel_dim_full": self.kernel_dim_full,
            "kernel_dim_x_only": self.kernel_dim_x_only,
            "smallest_singular_values": list(self.smallest_singular_values),
            "sigma_max": self.sigma_max,
            "kernel_tau_component": self.kernel_tau_component,
        }


def index_diagnostic(p, tau, x, threshold=KERNEL_THRESHOLD, count=3):
    """Numerical kernel dimensions of ``ds_x`` and of the bordered ``[d_tau s | ds_x]``.

    A singular value counts as zero when it is below ``threshold`` times the
    largest singular value of the bordered matrix.  When the bordered kernel
    is one-dimensional its unit basis vector is reported together with the
    modulus of its ``tau`` component.
    """
    Jx = assemble_jacobian_x(p, tau, x)
    col = tau_derivative(p, tau, x).to_real_vector()
    bordered = np.column_stack([col, Jx])
    _, s_full, Vt = scipy.linalg.svd(bordered, full_matrices=True)
    s_x = scipy.linalg.svdvals(Jx)
    smax = float(s_full[0])
    cut = threshold * smax
    rank_full = int(np.sum(s_full >= cut))
    dim_full = bordered.shape[1] - rank_full
    dim_x = int(np.sum(s_x < cut))
    kvec = tau_comp = None
    if dim_full == 1:
        kvec = Vt[-1].copy()
        if kvec[0] < 0:
            kvec = -kvec
        tau_comp = float(abs(kvec[0]))
    smallest = tuple(float(v) for v in np.sort(s_x)[:count])
    return IndexReport(dim_full, dim_x, smallest, smax, tau_comp, kvec)


def spectral_tail_ratio(x):
    """Share of the H^1 energy carried by wavenumbers ``|k| > K/2``."""
    k = x.wavenumbers
    e = (1.0 + (2.0 * np.pi * k) ** 2) * np.sum(np.abs(x.coeffs) ** 2, axis=0)
    total = float(e.sum())
    if total == 0.0:
        return 0.0
    return float(e[np.abs(k) > x.K / 2].sum() / total)
