import numpy as np
import pytest

from delayorbits import fields as vf
from delayorbits.errors import DimensionMismatch, JacobianMismatch
from delayorbits.fourier import PeriodicMap
from delayorbits.sweeps import random_map, sine_field


def all_fields():
    b = PeriodicMap.from_modes({1: [0.3, -0.2j], 2: [0.1, 0.05]}, dim=2, K=2)
    return [
        vf.zero_field(2),
        vf.linear_affine([[1.0, 2.0], [-1.0, 0.5]], b),
        vf.autonomous_linear([[1.0, 5.0], [0.0, -2.0]]),
        vf.logistic(),
        vf.forced_rotation(),
        vf.limit_cycle(),
        vf.delay_coefficient_logistic(),
        sine_field(),
    ]


@pytest.mark.parametrize("field", all_fields(), ids=lambda f: f.name)
def test_jacobian_self_test_passes(field):
    rep = vf.self_test_jacobian(field, probes=100, rng=0)
    assert rep.passed and rep.max_mismatch < 1e-5


def test_wrong_jacobian_detected():
    bad = vf.VectorFieldSpec(1, lambda t, y: y**3, lambda t, y: 2 * y[None] if np.ndim(t) else 2 * y[None, :])
    with pytest.raises(JacobianMismatch):
        vf.self_test_jacobian(bad, probes=20, rng=1)


def test_wrong_coefficient_gradient_detected():
    base = vf.linear_affine([[1.0]])
    bad = vf.DelayCoefficientField(base, lambda t, y: 1 + y[0] ** 2, lambda t, y: 3 * y)
    with pytest.raises(JacobianMismatch):
        vf.self_test_jacobian(bad, probes=20, rng=2)


@pytest.mark.parametrize("field", all_fields(), ids=lambda f: f.name)
def test_vectorized_matches_pointwise(field, rng):
    n = field.dim
    t = rng.uniform(0, 1, 7)
    y = rng.standard_normal((n, 7))
    if isinstance(field, vf.DelayCoefficientField):
        field = field.combined()
    F, J = field.evaluate(t, y), field.jacobian(t, y)
    assert F.shape == (n, 7) and J.shape == (n, n, 7)
    for i in range(7):
        assert np.allclose(F[:, i], field.evaluate(t[i], y[:, i]), atol=1e-14)
        assert np.allclose(J[:, :, i], field.jacobian(t[i], y[:, i]), atol=1e-14)


def test_time_is_periodic(rng):
    f = vf.logistic()
    y = rng.standard_normal(1)
    assert np.array_equal(f(0.25, y), f(1.25, y))


def test_zero_field_and_autonomous_fixed_point():
    assert np.all(vf.zero_field(3)(0.3, np.ones(3)) == 0)
    f = vf.autonomous_linear(np.diag([1.0, -2.0]))
    assert np.all(f(0.7, np.zeros(2)) == 0)


def test_limit_cycle_unit_circle_is_orbit():
    f = vf.limit_cycle()
    t = np.linspace(0, 1, 9)
    y = np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)])
    dy = 2 * np.pi * np.stack([-np.sin(2 * np.pi * t), np.cos(2 * np.pi * t)])
    assert np.allclose(f(t, y), dy, atol=1e-12)


def test_eval_on_orbit_of_polynomial_is_exact(rng):
    # logistic is quadratic, so the dealiased product is exact
    f = vf.logistic(a=2.0, c=0.0)
    x = random_map(rng, 1, 6)
    got = vf.eval_on_orbit(f, x)
    fine = x.resize(12)
    expect_vals = 2.0 * fine.to_samples(25) * (1.0 - fine.to_samples(25))
    expect = PeriodicMap.from_samples(expect_vals).resize(6)
    assert np.max(np.abs((got - expect).coeffs)) < 1e-13


def test_linear_field_on_orbit(rng):
    B = np.array([[0.5, 1.0], [-1.0, 0.0]])
    b = PeriodicMap.from_modes({1: [1.0, 0.5j]}, dim=2, K=1)
    f = vf.linear_affine(B, b)
    x = random_map(rng, 2, 5)
    got = vf.eval_on_orbit(f, x)
    expect = PeriodicMap(B @ x.coeffs) + b.resize(5)
    assert np.max(np.abs((got - expect).coeffs)) < 1e-13


def test_jacobian_on_orbit_shape(rng):
    x = random_map(rng, 2, 4)
    J = vf.jacobian_on_orbit(vf.limit_cycle(), x)
    assert J.shape == (2, 2, 9)


def test_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        vf.eval_on_orbit(vf.logistic(), random_map(rng, 2, 4))
    with pytest.raises(DimensionMismatch):
        vf.linear_affine(np.ones((2, 3)))
    with pytest.raises(DimensionMismatch):
        vf.linear_affine(np.eye(2), PeriodicMap.zeros(3, K=1))


def test_combined_field_of_coefficient_form(rng):
    g = vf.delay_coefficient_logistic(a=-1.0, c=1.0, beta=0.5)
    ode = vf.as_ode_field(g)
    y = rng.standard_normal(1)
    t = 0.3
    expect = (1 + 0.5 * y[0] ** 2) * (-y + np.cos(2 * np.pi * t))
    assert np.allclose(ode(t, y), expect, atol=1e-15)
    assert vf.as_ode_field(vf.logistic()).name == "logistic"


def test_unknown_family_tag():
    with pytest.raises(ValueError):
        vf.VectorFieldSpec(1, None, None, family_tag="Nope")


def test_from_pointwise_wraps_scalar_callbacks(rng):
    f = vf.from_pointwise(2, lambda t, y: np.array([y[1], -y[0]]),
                          lambda t, y: np.array([[0.0, 1.0], [-1.0, 0.0]]))
    t = rng.uniform(0, 1, 5)
    y = rng.standard_normal((2, 5))
    assert np.allclose(f(t, y), np.stack([y[1], -y[0]]))
    assert f.jacobian(t, y).shape == (2, 2, 5)
