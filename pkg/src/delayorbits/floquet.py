"""Floquet certification of 1-periodic orbits of the undelayed field.

With ``A(t) = -dX_t(x(t))^T`` the fundamental system ``Y' = A Y`` and the
adjoint system ``Z' = -A^T Z = dX Z`` satisfy ``Z^T Y = I``, and the
monodromy (linearized time-1 map) equals ``(Y(1)^T)^{-1} = Z(1)``.  The
report also integrates the variational equation along the numerically
integrated flow, an independent second route to the monodromy.

All integrations use classical RK4 with a fixed step.  Orbit values between
collocation nodes come from exact evaluation of the Fourier series.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegratorBlowup, NotAnOrbit
from .fields import as_ode_field
from .fourier import PeriodicMap
from .section import SectionProblem, residual

__all__ = [
    "Verdict",
    "MonodromyReport",
    "CokernelCandidate",
    "FundamentalSystem",
    "fundamental_system",
    "flow_with_variation",
    "flow_samples",
    "monodromy_report",
    "cokernel_search",
    "sort_multipliers",
    "DEFAULT_STEPS",
    "TOL_NONDEG",
]

DEFAULT_STEPS = 2048
TOL_NONDEG = 1e-4
BLOWUP = 1e12
ORBIT_TOL = 1e-6


class Verdict(str, enum.Enum):
    NON_DEGENERATE = "NonDegenerate"
    DEGENERATE = "Degenerate"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FundamentalSystem:
    times: np.ndarray   # (steps + 1,)
    Y: np.ndarray       # (steps + 1, n, n)


def _matrix_function(A, times):
    if callable(A):
        vals = np.asarray(A(times), dtype=float)
        if vals.ndim == 2:
            vals = np.broadcast_to(vals[:, :, None], vals.shape + (times.size,))
        return np.moveaxis(vals, -1, 0)
    A = np.asarray(A, dtype=float)
    return np.broadcast_to(A, (times.size,) + A.shape)


def fundamental_system(A, steps=DEFAULT_STEPS, Y0=None):
    """Solve ``Y' = A(t) Y`` on [0, 1] with RK4.

    Parameters
    ----------
    A : callable or array
        ``A(t)`` for an array of times returns shape (n, n, T); a constant
        (n, n) array is also accepted.
    steps : int
        Number of uniform RK4 steps (at least 64).
    Y0 : array, optional
        Initial value, identity by default.
    """
    if steps < 64:
        raise ValueError(f"need at least 64 steps, got {steps}")
    h = 1.0 / steps
    nodes = np.arange(2 * steps + 1) / (2 * steps)
    As = _matrix_function(A, nodes)
    n = As.shape[1]
    Y = np.eye(n) if Y0 is None else np.array(Y0, dtype=float)
    out = np.empty((steps + 1, n, n))
    out[0] = Y
    for i in range(steps):
        A0, Am, A1 = As[2 * i], As[2 * i + 1], As[2 * i + 2]
        k1 = A0 @ Y
        k2 = Am @ (Y + 0.5 * h * k1)
        k3 = Am @ (Y + 0.5 * h * k2)
        k4 = A1 @ (Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(Y)) or np.abs(Y).max() > BLOWUP:
            raise IntegratorBlowup(f"fundamental system exceeded {BLOWUP:.0e} at t={(i + 1) * h:.4f}")
        out[i + 1] = Y
    return FundamentalSystem(np.arange(steps + 1) * h, out)


def _rk4_flow_step(field, t, y, P, h):
    def rhs(s, z, Q):
        return field.evaluate(s, z), field.jacobian(s, z) @ Q

    a1, b1 = rhs(t, y, P)
    a2, b2 = rhs(t + 0.5 * h, y + 0.5 * h * a1, P + 0.5 * h * b1)
    a3, b3 = rhs(t + 0.5 * h, y + 0.5 * h * a2, P + 0.5 * h * b2)
    a4, b4 = rhs(t + h, y + h * a3, P + h * b3)
    y = y + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    P = P + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(P))) or max(
            np.abs(y).max(), np.abs(P).max()) > BLOWUP:
        raise IntegratorBlowup(f"flow exceeded {BLOWUP:.0e} near t={t + h:.4f}")
    return y, P


def flow_with_variation(field, y0, steps=DEFAULT_STEPS, t0=0.0, t1=1.0):
    """Flow map and its derivative: ``(Phi^{t0->t1}(y0), dPhi^{t0->t1}(y0))``."""
    y = np.array(y0, dtype=float)
    P = np.eye(y.size)
    h = (t1 - t0) / steps
    for i in range(steps):
        y, P = _rk4_flow_step(field, t0 + i * h, y, P, h)
    return y, P


def flow_samples(field, y0, N, steps=DEFAULT_STEPS):
    """Trajectory from ``y0`` at the nodes ``i/N`` of [0, 1).

    Each interval between nodes is covered by ``ceil(steps / N)`` RK4 steps so
    that the samples are integrator values, not interpolants.

    Returns
    -------
    samples : (n, N) array
    y_end : (n,) array, the state at ``t = 1``.
    """
    sub = max(1, math.ceil(steps / N))
    y = np.array(y0, dtype=float)
    P = np.eye(y.size)
    out = np.empty((y.size, N))
    h = 1.0 / (N * sub)
    for i in range(N):
        out[:, i] = y
        for j in range(sub):
            y, P = _rk4_flow_step(field, (i * sub + j) * h, y, P, h)
    return out, y


def sort_multipliers(values):
    """Deterministic order: by modulus, then by argument."""
    vals = np.asarray(values, dtype=complex)
    order = np.lexsort((np.round(np.angle(vals), 12), np.round(np.abs(vals), 12)))
    return vals[order]


@dataclass(frozen=True)
class MonodromyReport:
    Y1: np.ndarray
    Z1: np.ndarray
    monodromy: np.ndarray
    multipliers: np.ndarray
    min_dist_to_one: float
    verdict: Verdict
    adjoint_defect: float
    two_route_defect: float
    variational_monodromy: np.ndarray
    tol_nondeg: float
    symmetry_defect: float | None = None

    def as_dict(self):
        return {
            "Y1": self.Y1.tolist(),
            "Z1": self.Z1.tolist(),
            "monodromy": self.monodromy.tolist(),
            "multipliers": [[float(m.real), float(m.imag)] for m in self.multipliers],
            "min_dist_to_one": self.min_dist_to_one,
            "verdict": self.verdict.value,
            "adjoint_defect": self.adjoint_defect,
            "two_route_defect": self.two_route_defect,
            "tol_nondeg": self.tol_nondeg,
            "symmetry_defect": self.symmetry_defect,
        }


def _require_orbit(field, x, orbit_tol):
    err = residual(SectionProblem(field, x.K), 0.0, x).sobolev_norm(0)
    if err > orbit_tol:
        raise NotAnOrbit(f"residual at tau=0 is {err:.3e} > {orbit_tol:.1e}")


def _fundamental_pair(ode, x, steps):
    n = x.dim

    def dX(t):
        return ode.jacobian(t, x(t))

    def A(t):
        return -np.transpose(dX(t), (1, 0, 2))

    Ysys = fundamental_system(A, steps)
    Zsys = fundamental_system(dX, steps)
    prod = np.einsum("tji,tjk->tik", Zsys.Y, Ysys.Y) - np.eye(n)
    adjoint_defect = float(np.max(np.linalg.norm(prod, ord=2, axis=(1, 2))))
    return Ysys, Zsys, adjoint_defect


def monodromy_report(field, x, steps=DEFAULT_STEPS, tol_nondeg=TOL_NONDEG, orbit_tol=ORBIT_TOL):
    """Multipliers, defects and degeneracy verdict for an orbit ``x`` of ``field`` at tau = 0.

    The verdict is ``Inconclusive`` when the adjoint identity or the
    agreement of the two monodromy routes is off by more than ``1e-6``.
    """
    _require_orbit(field, x, orbit_tol)
    ode = as_ode_field(field)
    Ysys, Zsys, adjoint_defect = _fundamental_pair(ode, x, steps)
    Y1, Z1 = Ysys.Y[-1], Zsys.Y[-1]
    mono = np.linalg.inv(Y1.T)
    _, direct = flow_with_variation(ode, x(0.0), steps)
    two_route = float(np.linalg.norm(direct - mono) / max(np.linalg.norm(mono), 1e-300))
    mults = sort_multipliers(np.linalg.eigvals(mono))
    dist = float(np.min(np.abs(mults - 1.0)))
    if adjoint_defect > 1e-6 or two_route > 1e-6:
        verdict = Verdict.INCONCLUSIVE
    elif dist > tol_nondeg:
        verdict = Verdict.NON_DEGENERATE
    else:
        verdict = Verdict.DEGENERATE
    sym = float(np.linalg.norm(Y1 - Z1)) if getattr(field, "hamiltonian", False) else None
    return MonodromyReport(Y1, Z1, mono, mults, dist, verdict, adjoint_defect, two_route,
                           direct, tol_nondeg, sym)


@dataclass(frozen=True)
class CokernelCandidate:
    """A 1-periodic solution of ``eta' = -dX(x)^T eta`` (annihilates the range of ds_0)."""

    eta0: np.ndarray
    times: np.ndarray
    eta: np.ndarray          # (steps + 1, n)
    multiplier: complex
    periodicity_defect: float
    pairing_defect: float


def _random_direction(dim, K, rng):
    k = np.arange(-K, K + 1)
    c = (rng.standard_normal((dim, 2 * K + 1)) + 1j * rng.standard_normal((dim, 2 * K + 1)))
    return PeriodicMap(c * np.exp(-0.3 * np.abs(k)))


def _pairing_defect(ode, x, times, eta, trials, rng):
    t = times[:-1]
    xs = x(t)
    J = ode.jacobian(t, xs)
    e = eta[:-1].T
    eta_norm = math.sqrt(float(np.mean(np.sum(e ** 2, axis=0))))
    worst = 0.0
    for _ in range(trials):
        xh = _random_direction(x.dim, x.K, rng)
        image = xh.derivative()(t) - np.einsum("ijm,jm->im", J, xh(t))
        pairing = float(np.mean(np.sum(image * e, axis=0)))
        worst = max(worst, abs(pairing) / (xh.sobolev_norm(1) * eta_norm))
    return worst


def cokernel_search(field, x, steps=DEFAULT_STEPS, tol_nondeg=TOL_NONDEG, trials=50, rng=0,
                    orbit_tol=ORBIT_TOL):
    """Periodic adjoint solutions ``eta(t) = Y(t) eta(0)`` for multipliers of ``Y(1)`` near 1.

    Each candidate carries the L^2 pairing defect
    ``max |<ds_0(x) xhat, eta>| / (||xhat||_1 ||eta||_0)`` over ``trials``
    random smooth directions, computed by periodic trapezoid quadrature on
    the integration grid.  An empty list means ``ds_0(x)`` is onto.
    """
    _require_orbit(field, x, orbit_tol)
    ode = as_ode_field(field)
    rng = np.random.default_rng(rng)

    def A(t):
        return -np.transpose(ode.jacobian(t, x(t)), (1, 0, 2))

    Ysys = fundamental_system(A, steps)
    vals, vecs = np.linalg.eig(Ysys.Y[-1])
    near = np.abs(vals - 1.0) <= tol_nondeg
    if not np.any(near):
        return []
    basis, _ = np.linalg.qr(np.real(vecs[:, near]))
    out = []
    for j in range(basis.shape[1]):
        eta0 = basis[:, j]
        eta = Ysys.Y @ eta0
        lam = complex(vals[near][j])
        out.append(CokernelCandidate(
            eta0=eta0,
            times=Ysys.times,
            eta=eta,
            multiplier=lam,
            periodicity_defect=float(np.linalg.norm(eta[-1] - eta[0])),
            pairing_defect=_pairing_defect(ode, x, Ysys.times, eta, trials, rng),
        ))
    return out

