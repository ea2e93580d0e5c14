"""Seed orbits by shooting and Newton correction of delay orbits at fixed delay."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dgecon

from .errors import (
    DegenerateSeed,
    LineSearchFailed,
    MaxIterExceeded,
    ShootingDiverged,
    SingularJacobian,
)
from .fields import as_ode_field
from .floquet import DEFAULT_STEPS, TOL_NONDEG, flow_samples, flow_with_variation, monodromy_report
from .fourier import DEFAULT_K, PeriodicMap
from .section import SectionProblem, assemble_jacobian_x, residual

__all__ = [
    "NewtonSettings",
    "NewtonReport",
    "newton_correct",
    "find_seed_orbit",
    "condition_estimate",
    "MAX_CONDITION",
]

MAX_CONDITION = 1e10
RESIDUAL_FLOOR = 1e-13


@dataclass(frozen=True)
class NewtonSettings:
    max_iter: int = 25
    tol_residual: float = 1e-11
    tol_step: float = 1e-12
    damping: str = "none"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.tol_residual <= 0 or self.tol_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.damping not in ("none", "armijo_halving"):
            raise ValueError(f"unknown damping {self.damping!r}")


@dataclass
class NewtonReport:
    iterates: list = dc_field(default_factory=list)
    converged: bool = False
    condition_estimate: float = math.nan
    final_x: PeriodicMap | None = None
    step_norms: list = dc_field(default_factory=list)

    @property
    def iterations(self):
        return len(self.iterates) - 1

    @property
    def final_residual(self):
        return self.iterates[-1]

    def _tail(self):
        r = [v for v in self.iterates if v > RESIDUAL_FLOOR]
        return r

    @property
    def quadratic_constant(self):
        """``max r[i+1] / r[i]^2`` over the last three residuals above round-off."""
        r = self.iterates[-3:]
        ratios = [r[i + 1] / r[i] ** 2 for i in range(len(r) - 1) if r[i] > 0]
        return max(ratios) if ratios else math.nan

    @property
    def order_estimate(self):
        """Observed convergence order from the last residual triple above round-off."""
        r = self._tail()
        orders = []
        for i in range(1, len(r) - 1):
            a, b = math.log(r[i] / r[i - 1]), math.log(r[i + 1] / r[i])
            if a < 0:
                orders.append(b / a)
        return orders[-1] if orders else math.nan

    def summary(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "condition_estimate": self.condition_estimate,
        }


def _lu(J):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(J, check_finite=False)


def condition_estimate(J, lu=None):
    """1-norm condition number estimated from LU factors (LAPACK ``gecon``)."""
    if lu is None:
        lu, _ = _lu(J)
    anorm = np.linalg.norm(J, 1)
    rcond, info = dgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0.0 or not np.isfinite(rcond):
        return math.inf
    return 1.0 / rcond


def newton_correct(p, tau, x_guess, settings=None):
    """Newton's method for ``s(tau, .) = 0`` at fixed delay ``tau``.

    Raises
    ------
    SingularJacobian
        The Jacobian condition estimate exceeds ``MAX_CONDITION`` when a
        step is needed (degenerate problem).
    MaxIterExceeded, LineSearchFailed
        With the partial report attached as ``.report``.
    """
    settings = settings or NewtonSettings()
    n, K = p.dim, p.K
    x = x_guess
    res = residual(p, tau, x)
    r = res.sobolev_norm(0)
    report = NewtonReport(iterates=[r], final_x=x)
    while True:
        if r <= settings.tol_residual:
            report.converged = True
            break
        if report.iterations >= settings.max_iter:
            raise MaxIterExceeded(
                f"no convergence in {settings.max_iter} iterations (residual {r:.3e})", report)
        J = assemble_jacobian_x(p, tau, x)
        lu = _lu(J)
        cond = condition_estimate(J, lu[0])
        report.condition_estimate = cond
        if cond > MAX_CONDITION:
            raise SingularJacobian(f"Jacobian condition estimate {cond:.3e} at tau={tau:.6g}")
        dx = PeriodicMap.from_real_vector(
            scipy.linalg.lu_solve(lu, -res.to_real_vector(), check_finite=False), n, K)
        lam = 1.0
        while True:
            trial = x + lam * dx
            trial_res = residual(p, tau, trial)
            trial_r = trial_res.sobolev_norm(0)
            if settings.damping == "none" or trial_r <= (1.0 - 1e-4 * lam) * r:
                break
            lam *= 0.5
            if lam < 2.0 ** -12:
                raise LineSearchFailed(f"line search failed at residual {r:.3e}", report)
        x, res, r = trial, trial_res, trial_r
        step = lam * dx.sobolev_norm(1)
        report.iterates.append(r)
        report.step_norms.append(step)
        report.final_x = x
        if not np.isfinite(r):
            raise MaxIterExceeded("residual became non-finite", report)
        if step <= settings.tol_step:
            report.converged = r <= settings.tol_residual
            if not report.converged:
                raise MaxIterExceeded(f"stagnated at residual {r:.3e}", report)
            break
    if math.isnan(report.condition_estimate):
        report.condition_estimate = condition_estimate(assemble_jacobian_x(p, tau, x))
    return report


def _least_squares_polish(p, tau, x, settings):
    """Minimum-norm Gauss-Newton steps for degenerate problems (singular Jacobian)."""
    n, K = p.dim, p.K
    res = residual(p, tau, x)
    iterates = [res.sobolev_norm(0)]
    for _ in range(settings.max_iter):
        if iterates[-1] <= settings.tol_residual:
            break
        J = assemble_jacobian_x(p, tau, x)
        delta, *_ = scipy.linalg.lstsq(J, -res.to_real_vector(), cond=1e-10)
        x = x + PeriodicMap.from_real_vector(delta, n, K)
        res = residual(p, tau, x)
        iterates.append(res.sobolev_norm(0))
    return NewtonReport(iterates=iterates, converged=iterates[-1] <= settings.tol_residual,
                        condition_estimate=math.inf, final_x=x)


def find_seed_orbit(field, y_guess, settings=None, K=DEFAULT_K, steps=DEFAULT_STEPS,
                    tol_nondeg=TOL_NONDEG, shoot_tol=1e-12, max_shoot=50):
    """Locate a 1-periodic orbit of the undelayed field and certify it.

    Newton on ``F(y) = Phi^1(y) - y`` with Jacobian ``dPhi^1 - I`` from the
    variational equation, then sampling of the trajectory on the
    collocation grid, spectral projection and a Newton polish of the
    section at ``tau = 0``.

    Returns
    -------
    x0 : PeriodicMap
    report : MonodromyReport
    """
    settings = settings or NewtonSettings()
    ode = as_ode_field(field)
    y = np.atleast_1d(np.array(y_guess, dtype=float))
    if y.size != ode.dim:
        raise ValueError(f"guess has {y.size} components, field has {ode.dim}")
    for _ in range(max_shoot):
        y1, P = flow_with_variation(ode, y, steps)
        F = y1 - y
        fnorm = float(np.linalg.norm(F))
        if fnorm <= shoot_tol * (1.0 + np.linalg.norm(y)):
            break
        M = P - np.eye(y.size)
        sv = scipy.linalg.svdvals(M)
        if sv[-1] <= 1e-10 * max(1.0, sv[0]):
            if fnorm <= 1e-8 * (1.0 + np.linalg.norm(y)):
                break
            raise DegenerateSeed(f"dPhi^1 - I is singular (sigma_min={sv[-1]:.2e})")
        step = np.linalg.solve(M, F)
        y = y - step
        if not np.all(np.isfinite(y)) or np.linalg.norm(y) > 1e8:
            raise ShootingDiverged("shooting iterate left the bounded region")
        if np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(y)):
            break
    else:
        raise ShootingDiverged(f"shooting did not converge in {max_shoot} iterations")

    samples, _ = flow_samples(ode, y, 2 * K + 1, steps)
    x = PeriodicMap.from_samples(samples)
    p = SectionProblem(field, K)
    try:
        polish = newton_correct(p, 0.0, x, settings)
    except SingularJacobian:
        polish = _least_squares_polish(p, 0.0, x, settings)
    x0 = polish.final_x
    return x0, monodromy_report(field, x0, steps, tol_nondeg)
