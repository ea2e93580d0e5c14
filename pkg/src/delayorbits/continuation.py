"""Natural-parameter continuation of delay orbits in the delay ``tau``.

Near a non-degenerate seed the zero set of the section is a graph over the
delay axis, so branches are parametrized by ``tau`` itself.  Each step
predicts with the tangent ``dx/dtau = -ds_x^{-1} d_tau s`` and corrects
with Newton at the new delay.  Folds are not followed: a singular Jacobian
ends the branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg

from .errors import InsufficientPoints, LineSearchFailed, MaxIterExceeded, SingularJacobian
from .fourier import PeriodicMap
from .orbit import MAX_CONDITION, NewtonSettings, _lu, condition_estimate, newton_correct
from .section import assemble_jacobian_x, index_diagnostic, residual, tau_derivative

__all__ = [
    "StepControl",
    "BranchPoint",
    "OrbitBranch",
    "SmoothnessReport",
    "tangent",
    "make_branch_point",
    "continue_branch",
    "continue_both",
    "merge_branches",
    "uniform_branch",
    "smoothness_diagnostic",
    "REACHED",
    "SINGULAR",
    "NEWTON_FAILED",
    "UNDERFLOW",
]

REACHED = "ReachedTarget"
SINGULAR = "SingularJacobian"
NEWTON_FAILED = "NewtonFailed"
UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class StepControl:
    initial: float = 0.02
    min_step: float = 1e-5
    max_step: float = 0.05
    grow: float = 1.5
    grow_after: int = 2

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial <= self.max_step:
            raise ValueError("need 0 < min_step <= initial <= max_step")
        if self.grow < 1.0 or self.grow_after < 1:
            raise ValueError("grow factor must be >= 1 and grow_after >= 1")


@dataclass
class BranchPoint:
    tau: float
    x: PeriodicMap
    tangent_dx: PeriodicMap | None = None
    certificate: dict = dc_field(default_factory=dict)


@dataclass
class OrbitBranch:
    points: list
    termination_reason: str
    problem_digest: str = ""
    details: dict = dc_field(default_factory=dict)

    @property
    def taus(self):
        return np.array([pt.tau for pt in self.points])

    @property
    def tau_range(self):
        t = self.taus
        return (float(t.min()), float(t.max())) if t.size else (math.nan, math.nan)

    def __len__(self):
        return len(self.points)


def tangent(p, tau, x):
    """Solve ``ds_x(tau, x) v = -d_tau s(tau, x)`` for the branch tangent ``v = dx/dtau``."""
    J = assemble_jacobian_x(p, tau, x)
    lu = _lu(J)
    cond = condition_estimate(J, lu[0])
    if cond > MAX_CONDITION:
        raise SingularJacobian(f"Jacobian condition estimate {cond:.3e} at tau={tau:.6g}")
    rhs = -tau_derivative(p, tau, x).to_real_vector()
    v = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
    return PeriodicMap.from_real_vector(v, p.dim, p.K)


def make_branch_point(p, tau, x, newton_report=None):
    """Attach tangent and kernel diagnostics to an accepted solution."""
    dx = tangent(p, tau, x)
    diag = index_diagnostic(p, tau, x)
    cert = {"kernel": diag.as_dict(),
            "residual": residual(p, tau, x).sobolev_norm(0)}
    if newton_report is not None:
        cert["newton"] = newton_report.summary()
    return BranchPoint(float(tau), x, dx, cert)


def continue_branch(p, seed, tau_target, step=None, settings=None):
    """March from ``seed`` to ``tau_target`` with tangent predictor and Newton corrector.

    Step control: halve after a failed correction, grow after
    ``grow_after`` consecutive successes, never exceed ``max_step``.  The
    branch stops with ``StepUnderflow`` once the step would drop below
    ``min_step`` and with ``SingularJacobian`` as soon as a Jacobian is
    numerically singular.
    """
    step = step or StepControl()
    settings = settings or NewtonSettings()
    if residual(p, seed.tau, seed.x).sobolev_norm(0) > settings.tol_residual:
        try:
            rep = newton_correct(p, seed.tau, seed.x, settings)
        except SingularJacobian:
            return OrbitBranch([seed], SINGULAR)
        except (MaxIterExceeded, LineSearchFailed):
            return OrbitBranch([seed], NEWTON_FAILED)
        seed = BranchPoint(seed.tau, rep.final_x, None, seed.certificate)
    if seed.tangent_dx is None or not seed.certificate.get("kernel"):
        try:
            seed = make_branch_point(p, seed.tau, seed.x)
        except SingularJacobian:
            return OrbitBranch([seed], SINGULAR)

    points = [seed]
    direction = math.copysign(1.0, tau_target - seed.tau)
    h = step.initial
    streak = 0
    reason = REACHED
    while True:
        cur = points[-1]
        remaining = abs(tau_target - cur.tau)
        if remaining <= 1e-14:
            break
        hh = min(h, step.max_step, remaining)
        new_tau = tau_target if remaining - hh <= 1e-12 else cur.tau + direction * hh
        guess = cur.x + (new_tau - cur.tau) * cur.tangent_dx
        try:
            rep = newton_correct(p, new_tau, guess, settings)
            pt = make_branch_point(p, new_tau, rep.final_x, rep)
        except SingularJacobian:
            reason = SINGULAR
            break
        except (MaxIterExceeded, LineSearchFailed):
            h = hh / 2.0
            streak = 0
            if h < step.min_step:
                reason = UNDERFLOW
                break
            continue
        points.append(pt)
        streak += 1
        h = hh
        if streak >= step.grow_after:
            h = min(hh * step.grow, step.max_step)
            streak = 0
    return OrbitBranch(points, reason)


def merge_branches(negative, positive):
    """Join two branches grown from the same seed in opposite directions."""
    pts = list(reversed(negative.points[1:])) + list(positive.points)
    reasons = {"negative": negative.termination_reason, "positive": positive.termination_reason}
    worst = next((r for r in reasons.values() if r != REACHED), REACHED)
    return OrbitBranch(pts, worst, positive.problem_digest or negative.problem_digest,
                       {"termination": reasons})


def continue_both(p, seed, tau_min, tau_max, step=None, settings=None):
    """Branches toward ``tau_min`` and ``tau_max`` from the same seed, merged in tau order."""
    pos = continue_branch(p, seed, tau_max, step, settings)
    start = pos.points[0]
    neg = continue_branch(p, start, tau_min, step, settings)
    return merge_branches(neg, pos)


def uniform_branch(p, start, taus, settings=None):
    """Corrected orbits on a prescribed monotone grid of delays.

    Used for smoothness diagnostics, which need equal spacing.  The first
    grid value is reached by ordinary continuation from ``start``.
    """
    settings = settings or NewtonSettings()
    taus = [float(t) for t in taus]
    cur = start
    if abs(taus[0] - start.tau) > 1e-14:
        br = continue_branch(p, start, taus[0], settings=settings)
        if br.termination_reason != REACHED:
            return OrbitBranch(br.points, br.termination_reason)
        cur = br.points[-1]
    elif cur.tangent_dx is None:
        cur = make_branch_point(p, cur.tau, cur.x)
    points = [cur]
    for tau in taus[1:]:
        guess = cur.x + (tau - cur.tau) * cur.tangent_dx
        try:
            rep = newton_correct(p, tau, guess, settings)
            cur = make_branch_point(p, tau, rep.final_x, rep)
        except SingularJacobian:
            return OrbitBranch(points, SINGULAR)
        except (MaxIterExceeded, LineSearchFailed):
            return OrbitBranch(points, NEWTON_FAILED)
        points.append(cur)
    return OrbitBranch(points, REACHED)


# -- smoothness of tau -> x_tau -------------------------------------------------

# second-order central stencils: offsets (in units of the spacing) and weights
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _difference(xs, center, order, spacing, h):
    offsets, weights = _STENCILS[order]
    acc = None
    for o, w in zip(offsets, weights):
        term = w * xs[center + o * spacing]
        acc = term if acc is None else acc + term
    return acc / (spacing * h) ** order


def _rate(coarse, fine):
    if coarse == 0.0 and fine == 0.0:
        return math.inf
    if fine == 0.0:
        return math.inf
    return math.log2(coarse / fine)


@dataclass
class SmoothnessReport:
    mode: str
    rates: dict              # (order, level) -> observed rate
    errors: dict             # (order, level) -> error/increment norms, finest first
    tangent_rates: dict      # level -> rate of first differences toward stored tangents
    max_difference: float
    min_rate: float
    passed: bool


def smoothness_diagnostic(branch, orders=(1, 2, 3, 4), levels=(0, 1, 2, 3), exact=None,
                          min_rate=1.5):
    """Convergence rates of central divided differences of ``tau -> x_tau``.

    With ``exact(order)`` (the analytic derivative at the central delay)
    errors at spacings ``h`` and ``2h`` are compared, which needs 9 uniformly
    spaced points.  Without it, successive increments at ``h, 2h, 4h`` give a
    self-convergence rate and 17 points are required.  The report passes
    when every rate is at least ``min_rate``.
    """
    taus = branch.taus
    n_pts = taus.size
    need = 9 if exact is not None else 17
    if n_pts < need:
        raise InsufficientPoints(f"need at least {need} uniformly spaced points, got {n_pts}")
    gaps = np.diff(taus)
    h = float(gaps.mean())
    if h == 0 or np.max(np.abs(gaps - h)) > 1e-9 * abs(h):
        raise InsufficientPoints("branch points are not uniformly spaced")
    center = n_pts // 2
    xs = [pt.x for pt in branch.points]
    rates, errors = {}, {}
    max_diff = 0.0
    for order in orders:
        diffs = {s: _difference(xs, center, order, s, h) for s in (1, 2, 4)
                 if center + 2 * s < n_pts and center - 2 * s >= 0}
        max_diff = max(max_diff, max(d.sobolev_norm(0) for d in diffs.values()))
        for m in levels:
            if exact is not None:
                ref = exact(order)
                e = [(diffs[s] - ref).sobolev_norm(m) for s in (1, 2)]
            else:
                e = [(diffs[2] - diffs[1]).sobolev_norm(m), (diffs[4] - diffs[2]).sobolev_norm(m)]
            errors[(order, m)] = tuple(e)
            rates[(order, m)] = _rate(e[1], e[0])
    tangent_rates = {}
    tan = branch.points[center].tangent_dx
    if tan is not None and 1 in orders:
        for m in levels:
            fine = (_difference(xs, center, 1, 1, h) - tan).sobolev_norm(m)
            coarse = (_difference(xs, center, 1, 2, h) - tan).sobolev_norm(m)
            tangent_rates[m] = _rate(coarse, fine)
    all_rates = list(rates.values()) + list(tangent_rates.values())
    passed = all(r >= min_rate for r in all_rates)
    return SmoothnessReport("analytic" if exact is not None else "self", rates, errors,
                            tangent_rates, max_diff, min_rate, passed)
