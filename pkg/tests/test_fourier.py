import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delayorbits.errors import EvenGridSize, LevelTooHigh, TooFewSamples, ZeroStep
from delayorbits.fourier import (
    MAX_LEVEL,
    PeriodicMap,
    analysis_matrix,
    dealiased_size,
    derivative_matrix,
    difference_quotient_gap,
    grid,
    high_frequency_witness,
    shift_matrix,
    synthesis_matrix,
)
from delayorbits.sweeps import random_map

TWO_PI = 2.0 * np.pi


def maps(dim=2, K=8):
    seeds = st.integers(min_value=0, max_value=2**32 - 1)
    return seeds.map(lambda s: random_map(np.random.default_rng(s), dim, K))


# -- construction -----------------------------------------------------------------

def test_constant_samples_give_only_mean_mode():
    x = PeriodicMap.from_samples(np.full((2, 7), [[1.5], [-2.0]]))
    assert np.allclose(x.mode(0), [1.5, -2.0], atol=1e-15)
    assert np.allclose(np.delete(x.coeffs, x.K, axis=1), 0.0, atol=1e-15)


def test_cosine_on_five_points():
    x = PeriodicMap.from_samples(np.cos(TWO_PI * grid(5)))
    assert x.mode(1)[0] == pytest.approx(0.5, abs=1e-15)
    assert x.mode(-1)[0] == pytest.approx(0.5, abs=1e-15)
    assert abs(x.mode(2)[0]) < 1e-15


def test_sine_of_second_mode_on_five_points():
    x = PeriodicMap.from_samples(np.sin(2 * TWO_PI * grid(5)))
    assert abs(x.mode(2)[0] - (-0.5j)) < 1e-15
    assert abs(x.mode(-2)[0] - 0.5j) < 1e-15


def test_grid_errors():
    with pytest.raises(EvenGridSize):
        PeriodicMap.from_samples(np.zeros(6))
    with pytest.raises(TooFewSamples):
        PeriodicMap.from_samples(np.zeros(1))
    with pytest.raises(TooFewSamples):
        PeriodicMap.zeros(1, K=4).to_samples(5)


def test_conjugate_symmetry_is_enforced():
    c = np.array([[1 + 1j, 2 + 3j, 4 - 1j]])
    x = PeriodicMap(c)
    assert x.mode(-1) == np.conj(x.mode(1))
    assert np.isreal(x.mode(0))


def test_coefficients_are_read_only():
    x = PeriodicMap.zeros(1, K=2)
    with pytest.raises(ValueError):
        x.coeffs[0, 0] = 1.0


@given(maps())
def test_samples_round_trip(x):
    y = PeriodicMap.from_samples(x.to_samples())
    scale = max(1.0, np.max(np.abs(x.coeffs)))
    assert np.max(np.abs(y.coeffs - x.coeffs)) <= 1e-13 * scale


def test_trig_evaluation_matches_grid_samples(rng):
    x = random_map(rng, 3, 10)
    M = 41
    assert np.allclose(x(grid(M)), x.to_samples(M), atol=1e-13)


def test_evaluation_is_periodic_at_dyadic_times(rng):
    x = random_map(rng, 2, 6)
    t = np.arange(16) / 16.0
    assert np.array_equal(x(t), x(t + 1.0))


# -- shift ------------------------------------------------------------------------

def test_shift_zero_is_identity(rng):
    x = random_map(rng, 2, 8)
    assert x.shift(0.0) == x


def test_quarter_shift_turns_cosine_into_sine():
    x = PeriodicMap.from_modes({1: 0.5}, K=4)
    t = np.linspace(0, 1, 9)
    assert np.allclose(x.shift(0.25)(t), np.sin(TWO_PI * t), atol=1e-15)


@settings(max_examples=200)
@given(maps(), st.floats(-3.0, 3.0), st.integers(0, MAX_LEVEL))
def test_shift_isometry(x, tau, m):
    assert abs(x.shift(tau).sobolev_norm(m) - x.sobolev_norm(m)) <= 1e-12 * x.sobolev_norm(m)


@given(maps(), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_shift_group_law(x, a, b):
    gap = np.max(np.abs((x.shift(a).shift(b) - x.shift(a + b)).coeffs))
    assert gap <= 1e-12


def test_shift_by_one_period_is_identity(rng):
    x = random_map(rng, 1, 8)
    assert np.max(np.abs((x.shift(1.0) - x).coeffs)) < 1e-13


def test_derivative_of_shift_second_order(rng):
    x = random_map(rng, 2, 12)
    tau = 0.37
    exact = -x.derivative().shift(tau)
    errs = []
    for h in (2e-2, 1e-2, 5e-3):
        fd = (x.shift(tau + h) - x.shift(tau - h)) / (2 * h)
        errs.append((fd - exact).sobolev_norm(0))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(rates) > 1.9


# -- derivative and norms ----------------------------------------------------------

def test_derivative_examples():
    const = PeriodicMap.constant([1.0, 2.0], K=3)
    assert const.derivative().sobolev_norm(0) == 0.0
    t = np.linspace(0, 1, 13)
    s = PeriodicMap.from_modes({1: -0.5j}, K=3)           # sin(2 pi t)
    assert np.allclose(s.derivative()(t), TWO_PI * np.cos(TWO_PI * t), atol=1e-13)
    c2 = PeriodicMap.from_modes({2: 0.5}, K=3)            # cos(4 pi t)
    assert np.allclose(c2.derivative()(t), -2 * TWO_PI * np.sin(2 * TWO_PI * t), atol=1e-12)


@given(maps())
def test_derivative_bounded_by_next_level(x):
    assert x.derivative().sobolev_norm(0) <= x.sobolev_norm(1) * (1 + 1e-14)


def test_norm_examples():
    assert PeriodicMap.zeros(2, K=3).sobolev_norm(2) == 0.0
    s = PeriodicMap.from_modes({1: -0.5j}, K=3)
    assert s.sobolev_norm(0) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert s.sobolev_norm(1) == pytest.approx(math.sqrt((1 + TWO_PI**2) / 2), rel=1e-15)


def test_norm_equals_l2_of_samples(rng):
    x = random_map(rng, 2, 7)
    v = x.to_samples(101)
    assert x.sobolev_norm(0) == pytest.approx(math.sqrt(np.mean(np.sum(v**2, axis=0))), rel=1e-13)


@given(maps(), st.integers(0, MAX_LEVEL - 1))
def test_norm_monotone_in_level(x, m):
    assert x.sobolev_norm(m) <= x.sobolev_norm(m + 1)


scalars = st.one_of(st.just(0.0), st.floats(1e-6, 5.0), st.floats(-5.0, -1e-6))


@given(maps(), maps(), scalars, st.integers(0, 3))
def test_norm_homogeneous_and_triangle(x, y, a, m):
    assert (a * x).sobolev_norm(m) == pytest.approx(abs(a) * x.sobolev_norm(m), rel=1e-13, abs=1e-300)
    assert (x + y).sobolev_norm(m) <= (x.sobolev_norm(m) + y.sobolev_norm(m)) * (1 + 1e-14)


def test_level_too_high():
    with pytest.raises(LevelTooHigh):
        PeriodicMap.zeros(1, K=2).sobolev_norm(MAX_LEVEL + 1)
    with pytest.raises(LevelTooHigh):
        PeriodicMap.zeros(1, K=2).sobolev_norm(-1)


# -- difference quotients -----------------------------------------------------------

def test_gap_of_constant_is_zero():
    assert difference_quotient_gap(PeriodicMap.constant(3.0, K=4), 0.2) == 0.0


def test_gap_small_step_sine():
    s = PeriodicMap.from_modes({1: -0.5j}, K=4)
    assert difference_quotient_gap(s, 1e-3) < 0.05


def test_gap_first_order_in_step(rng):
    x = random_map(rng, 2, 8)
    ratio = difference_quotient_gap(x, 1e-4) / difference_quotient_gap(x, 2e-4)
    assert ratio == pytest.approx(0.5, abs=1e-3)


def test_quotient_bound_direct_for_resolved_steps(rng):
    for _ in range(1000):
        x = random_map(rng, 2, 8)
        T = rng.uniform(1e-3, 1.0) * rng.choice([-1, 1])
        assert ((x.shift(T) - x) / T).sobolev_norm(0) <= x.derivative().sobolev_norm(0) * (1 + 1e-12)


def test_gap_matches_direct_formula_for_moderate_step(rng):
    x = random_map(rng, 2, 8)
    T = 0.1
    direct = ((x.shift(T) - x) / T + x.derivative()).sobolev_norm(0)
    assert difference_quotient_gap(x, T) == pytest.approx(direct, rel=1e-12)


def test_gap_zero_step():
    with pytest.raises(ZeroStep):
        difference_quotient_gap(PeriodicMap.zeros(1, K=2), 0.0)


@settings(max_examples=300)
@given(maps(), st.floats(-1.0, 1.0).filter(lambda T: abs(T) > 1e-9))
def test_difference_quotient_bounded_by_derivative(x, T):
    # mode-wise |exp(-2 pi i k T) - 1| / |T| = |2 sin(pi k T) / T|, free of cancellation
    k = x.wavenumbers
    quotient = math.sqrt(np.sum(np.abs(2 * np.sin(np.pi * k * T) / T * x.coeffs) ** 2))
    assert quotient <= x.derivative().sobolev_norm(0) * (1 + 1e-12) + 1e-12
    assert difference_quotient_gap(x, T) <= 2 * x.derivative().sobolev_norm(0) * (1 + 1e-12) + 1e-12


# -- high-frequency witness -----------------------------------------------------------

@pytest.mark.parametrize("K", [8, 32])
def test_witness_gap_at_least_one(K):
    for T in np.linspace(1 / (4 * K), 0.5, 101):
        x, gap = high_frequency_witness(T, K)
        assert x.sobolev_norm(0) == pytest.approx(1.0, rel=1e-14)
        assert gap >= 1.0


def test_witness_unresolved_step_rejected():
    with pytest.raises(ValueError):
        high_frequency_witness(1 / (4 * 8) / 3, 8)


# -- real basis and matrices -------------------------------------------------------------

def test_real_vector_round_trip(rng):
    x = random_map(rng, 3, 5)
    assert PeriodicMap.from_real_vector(x.to_real_vector(), 3, 5) == x


def test_record_round_trip_is_exact(rng):
    x = random_map(rng, 2, 6)
    rec = x.to_record()
    assert len(rec["coefficients"]) == 2 * 7 * 2
    assert PeriodicMap.from_record(rec) == x


def test_matrices_agree_with_operators(rng):
    K = 6
    x = random_map(rng, 1, K)
    v = x.to_real_vector()
    assert np.allclose(derivative_matrix(K) @ v, x.derivative().to_real_vector(), atol=1e-12)
    assert np.allclose(shift_matrix(K, 0.21) @ v, x.shift(0.21).to_real_vector(), atol=1e-13)
    t = np.linspace(0, 1, 17)
    assert np.allclose(synthesis_matrix(K, t) @ v, x(t)[0], atol=1e-13)
    M = dealiased_size(K)
    assert np.allclose(analysis_matrix(K, M) @ x.to_samples(M)[0], v, atol=1e-14)


def test_dealiased_size_is_odd_and_large_enough():
    for K in range(1, 40):
        M = dealiased_size(K)
        assert M % 2 == 1 and M >= 3 * K + 1


def test_resize_pads_and_truncates(rng):
    x = random_map(rng, 1, 4)
    assert x.resize(9).resize(4) == x
    assert x.resize(2).K == 2
