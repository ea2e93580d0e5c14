import math

import numpy as np
import pytest

from delayorbits import fields as vf
from delayorbits.errors import DimensionMismatch
from delayorbits.fourier import PeriodicMap
from delayorbits.oracles import linear_delay_orbit
from delayorbits.section import (
    SectionProblem,
    TangentVector,
    assemble_jacobian_x,
    index_diagnostic,
    linearize,
    residual,
    spectral_tail_ratio,
    tau_derivative,
)
from delayorbits.sweeps import random_map, sine_field

from conftest import linear_forcing

NONLINEAR = [vf.logistic(), vf.limit_cycle(), vf.delay_coefficient_logistic(), sine_field()]


def test_closed_form_linear_orbit_zeroes_section():
    b = linear_forcing()
    f = vf.linear_affine([[1.0]], b)
    p = SectionProblem(f, 16)
    for tau in (-0.3, 0.0, 0.17, 0.5):
        x = linear_delay_orbit([[1.0]], b, tau, K=16)
        assert residual(p, tau, x).sobolev_norm(0) < 1e-14


def test_residual_of_zero_field_is_derivative(rng):
    p = SectionProblem(vf.zero_field(2), 8)
    x = random_map(rng, 2, 8)
    assert residual(p, 0.3, x) == x.derivative()


def test_residual_periodic_in_tau(rng):
    p = SectionProblem(vf.logistic(), 8)
    x = random_map(rng, 1, 8, scale=0.3)
    gap = (residual(p, 0.2, x) - residual(p, 1.2, x)).sobolev_norm(0)
    assert gap < 1e-12


def test_coefficient_form_at_zero_delay_matches_combined_field(rng):
    g = vf.delay_coefficient_logistic()
    x = random_map(rng, 1, 8, decay=1.0, scale=0.3)
    p = SectionProblem(g, 8)
    r = residual(p, 0.0, x)
    expect = x.derivative() - vf.eval_on_orbit(g.combined(), x)
    assert (r - expect).sobolev_norm(0) < 1e-13


@pytest.mark.parametrize("field", NONLINEAR, ids=lambda f: f.name)
def test_matrix_agrees_with_linearize(field, rng):
    K = 8
    p = SectionProblem(field, K)
    x = random_map(rng, field.dim, K, decay=0.8, scale=0.5)
    tau = 0.23
    J = assemble_jacobian_x(p, tau, x)
    for _ in range(3):
        v = random_map(rng, field.dim, K)
        direct = linearize(p, tau, x, TangentVector(0.0, v)).to_real_vector()
        assert np.allclose(J @ v.to_real_vector(), direct, atol=1e-12)


@pytest.mark.parametrize("field", NONLINEAR, ids=lambda f: f.name)
def test_linearize_central_difference_order_two(field, rng):
    K = 10
    p = SectionProblem(field, K)
    x = random_map(rng, field.dim, K, decay=0.8, scale=0.5)
    tau = -0.31
    for _ in range(3):
        v = TangentVector(float(rng.uniform(-1, 1)), random_map(rng, field.dim, K, decay=0.8))
        exact = linearize(p, tau, x, v)
        errs = []
        for h in (4e-3, 2e-3, 1e-3):
            fd = (residual(p, tau + h * v.dtau, x + h * v.dx)
                  - residual(p, tau - h * v.dtau, x - h * v.dx)) / (2 * h)
            errs.append((fd - exact).sobolev_norm(0))
        assert math.log2(errs[1] / errs[2]) > 1.8


def test_tau_derivative_is_tau_column(rng):
    p = SectionProblem(vf.limit_cycle(), 8)
    x = random_map(rng, 2, 8)
    a = tau_derivative(p, 0.4, x)
    b = linearize(p, 0.4, x, TangentVector(1.0, PeriodicMap.zeros(2, 8)))
    assert (a - b).sobolev_norm(0) < 1e-14


def test_autonomous_field_is_time_translation_equivariant(rng):
    # s(tau, x(. - c)) = s(tau, x)(. - c) for autonomous X, hence ds_x(x') = d/dt s(tau, x)
    # band-limit x so the cubic field is resolved without aliasing
    f = vf.limit_cycle()
    x = random_map(rng, 2, 2, scale=0.5).resize(8)
    p = SectionProblem(f, 8)
    J = assemble_jacobian_x(p, 0.3, x)
    lhs = J @ x.derivative().to_real_vector()
    rhs = residual(p, 0.3, x).derivative().to_real_vector()
    assert np.allclose(lhs, rhs, atol=1e-11)


def test_index_nondegenerate_linear():
    b = linear_forcing()
    f = vf.linear_affine([[1.0]], b)
    x = linear_delay_orbit([[1.0]], b, 0.0, K=16)
    rep = index_diagnostic(SectionProblem(f, 16), 0.0, x)
    assert rep.kernel_dim_full == 1 and rep.kernel_dim_x_only == 0
    assert rep.kernel_tau_component >= 0.1


def test_index_degenerate_constant_mode():
    # a = 0: constants are in the kernel of ds_x
    f = vf.linear_affine([[0.0]], PeriodicMap.from_modes({1: 0.3}, K=2))
    x = PeriodicMap.from_modes({1: 0.3 / (2j * np.pi)}, K=8)
    rep = index_diagnostic(SectionProblem(f, 8), 0.0, x)
    assert rep.kernel_dim_x_only == 1


def test_spectral_tail_ratio():
    x = PeriodicMap.from_modes({1: 1.0}, K=8)
    assert spectral_tail_ratio(x) == 0.0
    y = PeriodicMap.from_modes({1: 1.0, 7: 1.0}, K=8)
    assert 0.9 < spectral_tail_ratio(y) < 1.0
    assert spectral_tail_ratio(PeriodicMap.zeros(1, 8)) == 0.0


def test_problem_checks(rng):
    with pytest.raises(ValueError):
        SectionProblem(vf.logistic(), 3)
    p = SectionProblem(vf.logistic(), 8)
    with pytest.raises(DimensionMismatch):
        residual(p, 0.0, random_map(rng, 1, 6))
    with pytest.raises(DimensionMismatch):
        residual(p, 0.0, random_map(rng, 2, 8))
    assert p.size == 17 and p.form == "PlainDelay"
    assert SectionProblem(vf.delay_coefficient_logistic(), 8).form == "DelayCoefficient"
