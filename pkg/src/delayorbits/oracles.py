"""Closed-form periodic delay orbits of linear-affine fields.

For ``X_t(y) = B y + b(t)`` the delay equation decouples by wavenumber:

    (2 pi i k I - B exp(-2 pi i k tau)) c_k = b_k.

These functions use only complex linear algebra on the forcing modes and
never touch the collocation solver, so they serve as independent oracles.
"""

from __future__ import annotations

import math

import numpy as np

from .fourier import PeriodicMap

__all__ = ["linear_delay_orbit", "linear_delay_orbit_derivative"]


def _blocks(B, k, tau):
    n = B.shape[0]
    return 2j * np.pi * k * np.eye(n) - B * np.exp(-2j * np.pi * k * tau)


def linear_delay_orbit(a_matrix, forcing, tau, K=None):
    """The 1-periodic solution of ``x' = B x(t - tau) + b(t)`` mode by mode."""
    return linear_delay_orbit_derivative(a_matrix, forcing, tau, 0, K)


def linear_delay_orbit_derivative(a_matrix, forcing, tau, order, K=None):
    """``d^order/dtau^order`` of the closed-form orbit, by Taylor-series inversion.

    With ``D(tau + h) = sum_j D_j h^j`` and ``D_0 = D(tau)``, the coefficients
    of ``x(tau + h) = sum_j X_j h^j`` follow from
    ``D_0 X_j = -sum_{i=1..j} D_i X_{j-i}``; the derivative is ``order! X_order``.
    """
    B = np.atleast_2d(np.asarray(a_matrix, dtype=float))
    n = B.shape[0]
    K = forcing.K if K is None else K
    out = np.zeros((n, 2 * K + 1), dtype=complex)
    for k in range(0, min(K, forcing.K) + 1):
        bk = forcing.mode(k)
        if not np.any(bk):
            continue
        D0 = _blocks(B, k, tau)
        unit = np.exp(-2j * np.pi * k * tau)
        w = -2j * np.pi * k
        Ds = [D0] + [-B * unit * w ** j / math.factorial(j) for j in range(1, order + 1)]
        Xs = [np.linalg.solve(D0, bk)]
        for j in range(1, order + 1):
            acc = sum(Ds[i] @ Xs[j - i] for i in range(1, j + 1))
            Xs.append(np.linalg.solve(D0, -acc))
        ck = math.factorial(order) * Xs[order]
        out[:, K + k] = ck
        out[:, K - k] = np.conj(ck)
    return PeriodicMap(out)
