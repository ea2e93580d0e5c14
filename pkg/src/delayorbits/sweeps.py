"""Randomized property sweeps behind the ``properties`` command.

Each suite returns a :class:`SuiteResult` holding named checks with the
observed value, the threshold and the verdict.  Suites are deterministic
for a given random seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fields as vf
from .fourier import MAX_LEVEL, PeriodicMap, difference_quotient_gap, high_frequency_witness
from .orbit import find_seed_orbit
from .section import SectionProblem, TangentVector, linearize, residual

__all__ = [
    "Check",
    "SuiteResult",
    "random_map",
    "sine_field",
    "observed_order",
    "shift_map_suite",
    "linearization_suite",
    "floquet_suite",
    "builtin_problems",
    "run_all",
]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    kind: str  # "max": value <= threshold; "min": value >= threshold

    @property
    def passed(self):
        if math.isnan(self.value):
            return False
        return self.value <= self.threshold if self.kind == "max" else self.value >= self.threshold


@dataclass
class SuiteResult:
    name: str
    checks: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, value, threshold, kind="max"):
        self.checks.append(Check(name, float(value), float(threshold), kind))

    def as_dict(self):
        return {"suite": self.name, "passed": self.passed,
                "checks": [{"name": c.name, "value": c.value, "threshold": c.threshold,
                            "kind": c.kind, "passed": c.passed} for c in self.checks]}


def random_map(rng, dim, K, decay=0.5, scale=1.0):
    """Random real PeriodicMap with coefficients decaying like ``exp(-decay |k|)``."""
    k = np.arange(-K, K + 1)
    c = (rng.standard_normal((dim, 2 * K + 1)) + 1j * rng.standard_normal((dim, 2 * K + 1)))
    c *= scale * np.exp(-decay * np.abs(k))
    return PeriodicMap(c)


def observed_order(err_coarse, err_fine, ratio=2.0, floor=0.0):
    """``log(e(h) / e(h / ratio)) / log(ratio)``.

    Returns ``inf`` when both errors are at or below ``floor``: the
    difference quotient is then exact up to round-off (e.g. central
    differences of a quadratic map) and no rate is observable.
    """
    if err_fine == 0.0 or max(err_coarse, err_fine) <= floor:
        return math.inf
    return math.log(err_coarse / err_fine) / math.log(ratio)


def shift_map_suite(rng, trials=1000, K=16):
    res = SuiteResult("shift_map")
    worst_iso = worst_group = 0.0
    worst_a2 = -math.inf
    for _ in range(trials):
        x = random_map(rng, 2, K)
        tau = float(rng.uniform(-1.0, 1.0))
        for m in range(MAX_LEVEL + 1):
            nx = x.sobolev_norm(m)
            worst_iso = max(worst_iso, abs(x.shift(tau).sobolev_norm(m) - nx) / nx)
        a, b = rng.uniform(-1.0, 1.0, size=2)
        gap = np.max(np.abs((x.shift(a).shift(b) - x.shift(a + b)).coeffs))
        worst_group = max(worst_group, gap)
        T = float(rng.uniform(-1.0, 1.0)) or 0.5
        quotient = ((x.shift(T) - x) / T).sobolev_norm(0)
        worst_a2 = max(worst_a2, quotient - x.derivative().sobolev_norm(0))
    res.add("isometry relative defect, levels 0..6", worst_iso, 1e-12)
    res.add("group law max coefficient gap", worst_group, 1e-12)
    res.add("difference quotient minus derivative norm", worst_a2, 1e-12)

    x = random_map(rng, 2, K)
    tau = 0.3
    exact = -x.derivative().shift(tau)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (x.shift(tau + h) - x.shift(tau - h)) / (2.0 * h)
        errs.append((fd - exact).sobolev_norm(0))
    res.add("derivative of shift, central-difference order", observed_order(*errs), 1.8, "min")

    gaps = [difference_quotient_gap(x, T) for T in (1e-3, 5e-4)]
    res.add("difference quotient gap, first-order ratio", gaps[1] / gaps[0], 0.55)

    worst_w = math.inf
    for T in np.linspace(1.0 / (4 * K), 0.5, 200):
        _, gap = high_frequency_witness(float(T), K)
        worst_w = min(worst_w, gap)
    res.add("high-frequency witness, smallest shift gap", worst_w, 1.0, "min")
    return res


def sine_field():
    """Scalar ``X_t(y) = sin(y) + cos(2 pi t)``, a non-polynomial test field."""

    def f(t, y):
        return np.sin(y) + np.cos(2.0 * np.pi * t)

    def df(t, y):
        d = np.cos(y)
        return d[None, :, :] if np.ndim(t) > 0 else d[None, :]

    return vf.VectorFieldSpec(1, f, df, family_tag="Custom", name="sine")


def _linearization_fields():
    return [vf.logistic(), vf.limit_cycle(), vf.delay_coefficient_logistic(), sine_field()]


def linearization_suite(rng, directions=10, K=12):
    res = SuiteResult("linearization")
    for field in _linearization_fields():
        p = SectionProblem(field, K)
        x = random_map(rng, field.dim, K, decay=0.8, scale=0.5)
        tau = float(rng.uniform(-0.4, 0.4))
        worst = math.inf
        for _ in range(directions):
            v = random_map(rng, field.dim, K, decay=0.8)
            exact = linearize(p, tau, x, TangentVector(0.0, v))
            errs = []
            for h in (1e-3, 5e-4):
                fd = (residual(p, tau, x + h * v) - residual(p, tau, x - h * v)) / (2.0 * h)
                errs.append((fd - exact).sobolev_norm(0))
            worst = min(worst, observed_order(*errs, floor=1e-10 * exact.sobolev_norm(0)))
        res.add(f"{field.name}: x-direction order (worst of {directions})", worst, 1.8, "min")
        exact = linearize(p, tau, x, TangentVector(1.0, PeriodicMap.zeros(field.dim, K)))
        errs = []
        for h in (1e-3, 5e-4):
            fd = (residual(p, tau + h, x) - residual(p, tau - h, x)) / (2.0 * h)
            errs.append((fd - exact).sobolev_norm(0))
        res.add(f"{field.name}: tau-direction order", observed_order(*errs), 1.8, "min")
    return res


def builtin_problems():
    """(label, field, shooting guess) for the built-in seed problems."""
    b = PeriodicMap.from_modes({1: -0.5j, 2: 0.25, 3: 0.1 + 0.05j}, dim=1, K=3)
    return [
        ("linear a=1", vf.linear_affine([[1.0]], b), [0.0]),
        ("linear a=0", vf.linear_affine([[0.0]], b), [0.0]),
        ("forced rotation", vf.forced_rotation(), [0.0, 0.0]),
        ("logistic", vf.logistic(), [1.5]),
        ("fixed point diag(1,-2)", vf.autonomous_linear(np.diag([1.0, -2.0])), [0.0, 0.0]),
        ("limit cycle", vf.limit_cycle(), [1.0, 0.0]),
        ("delay coefficient", vf.delay_coefficient_logistic(), [0.0]),
    ]


def floquet_suite(K=32, steps=2048):
    res = SuiteResult("floquet")
    for label, field, guess in builtin_problems():
        _, rep = find_seed_orbit(field, guess, K=K, steps=steps)
        res.add(f"{label}: adjoint identity defect", rep.adjoint_defect, 1e-8)
        res.add(f"{label}: two-route monodromy relative defect", rep.two_route_defect, 1e-7)
    return res


def run_all(rng_seed=0, K=32, steps=2048):
    rng = np.random.default_rng(rng_seed)
    return [shift_map_suite(rng), linearization_suite(rng), floquet_suite(K, steps)]
