import math

import numpy as np
import pytest
import scipy.linalg

from delayorbits import fields as vf
from delayorbits.errors import IntegratorBlowup, NotAnOrbit
from delayorbits.floquet import (
    Verdict,
    cokernel_search,
    flow_samples,
    flow_with_variation,
    fundamental_system,
    monodromy_report,
    sort_multipliers,
)
from delayorbits.fourier import PeriodicMap
from delayorbits.orbit import find_seed_orbit
from delayorbits.oracles import linear_delay_orbit

from conftest import linear_forcing

NONNORMAL = np.array([[1.0, 5.0], [0.0, -2.0]])


def test_constant_system_is_matrix_exponential():
    A = np.array([[0.3, -1.0], [2.0, -0.4]])
    Y = fundamental_system(A, steps=512).Y
    assert np.allclose(Y[-1], scipy.linalg.expm(A), atol=1e-11)
    assert np.allclose(Y[0], np.eye(2))


def test_time_dependent_scalar_system():
    # y' = cos(2 pi t) y  =>  y(t) = exp(sin(2 pi t) / (2 pi))
    sys_ = fundamental_system(lambda t: np.cos(2 * np.pi * t)[None, None, :], steps=256)
    exact = np.exp(np.sin(2 * np.pi * sys_.times) / (2 * np.pi))
    assert np.allclose(sys_.Y[:, 0, 0], exact, atol=1e-11)


def test_rk4_fourth_order():
    A = lambda t: np.stack([[np.cos(2 * np.pi * t), np.ones_like(t)],
                            [-np.ones_like(t), np.zeros_like(t)]])
    ref = fundamental_system(A, steps=4096).Y[-1]
    e1 = np.linalg.norm(fundamental_system(A, steps=64).Y[-1] - ref)
    e2 = np.linalg.norm(fundamental_system(A, steps=128).Y[-1] - ref)
    assert math.log2(e1 / e2) > 3.8


def test_fundamental_system_guards():
    with pytest.raises(ValueError):
        fundamental_system(np.eye(1), steps=10)
    with pytest.raises(IntegratorBlowup):
        fundamental_system(np.array([[60.0]]), steps=64)


def test_flow_with_variation_linear():
    f = vf.autonomous_linear(NONNORMAL)
    y1, P = flow_with_variation(f, [1.0, -1.0], steps=1024)
    E = scipy.linalg.expm(NONNORMAL)
    assert np.allclose(P, E, rtol=1e-10)
    assert np.allclose(y1, E @ [1.0, -1.0], rtol=1e-10)


def test_flow_samples_on_circle():
    samples, end = flow_samples(vf.limit_cycle(), [1.0, 0.0], 9, steps=2048)
    t = np.arange(9) / 9
    assert np.allclose(samples, [np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], atol=1e-10)
    assert np.allclose(end, [1.0, 0.0], atol=1e-10)


def test_sort_multipliers_is_deterministic():
    vals = [2.0, 1j, -1j, 0.5]
    assert list(sort_multipliers(vals)) == [0.5, -1j, 1j, 2.0]


def test_scalar_linear_multiplier_is_e():
    b = linear_forcing()
    f = vf.linear_affine([[1.0]], b)
    x = linear_delay_orbit([[1.0]], b, 0.0, K=16)
    rep = monodromy_report(f, x)
    assert abs(rep.multipliers[0] - math.e) < 1e-10
    assert rep.verdict is Verdict.NON_DEGENERATE
    assert rep.adjoint_defect < 1e-12 and rep.two_route_defect < 1e-12


@pytest.mark.parametrize("B", [np.diag([1.0, -2.0]), NONNORMAL], ids=["diag", "nonnormal"])
def test_fixed_point_monodromy_is_exponential(B):
    rep = monodromy_report(vf.autonomous_linear(B), PeriodicMap.zeros(2, 8))
    E = scipy.linalg.expm(B)
    assert np.linalg.norm(rep.monodromy - E) <= 1e-8 * np.linalg.norm(E)
    assert np.allclose(np.sort(rep.multipliers.real), np.sort(np.exp(np.diag(B))), rtol=1e-10)


def test_adjoint_is_inverse_transpose_along_orbit(logistic_seed):
    field, x0, rep = logistic_seed
    assert rep.adjoint_defect < 1e-10
    assert np.allclose(rep.Z1.T @ rep.Y1, np.eye(1), atol=1e-10)


def test_degenerate_scalar_problem():
    b = linear_forcing()
    f = vf.linear_affine([[0.0]], b)
    x0, rep = find_seed_orbit(f, [0.0], K=16)
    assert rep.verdict is Verdict.DEGENERATE
    assert rep.min_dist_to_one < 1e-10
    cands = cokernel_search(f, x0)
    assert len(cands) == 1
    assert cands[0].pairing_defect < 1e-6 and cands[0].periodicity_defect < 1e-10


def test_nondegenerate_cokernel_empty():
    b = linear_forcing()
    f = vf.linear_affine([[1.0]], b)
    assert cokernel_search(f, linear_delay_orbit([[1.0]], b, 0.0, K=16)) == []


def test_limit_cycle_is_degenerate():
    f = vf.limit_cycle()
    x0, rep = find_seed_orbit(f, [1.0, 0.0], K=16)
    assert rep.verdict is Verdict.DEGENERATE
    mults = np.sort(np.abs(rep.multipliers))
    assert mults[1] == pytest.approx(1.0, abs=1e-9)
    assert mults[0] == pytest.approx(math.exp(-2.0), rel=1e-8)
    cands = cokernel_search(f, x0)
    assert len(cands) == 1 and cands[0].pairing_defect < 1e-6


def test_rotation_field_flagged_hamiltonian_has_equal_systems():
    # skew-symmetric linearization: A = -dX^T = dX, so Y and Z coincide
    J = 2 * np.pi * np.array([[0.0, -1.0], [1.0, 0.0]])
    f = vf.VectorFieldSpec(
        2, lambda t, y: J @ y,
        lambda t, y: np.broadcast_to(J[:, :, None], (2, 2, np.size(t))).copy() if np.ndim(t) else J,
        family_tag="LinearAffine", hamiltonian=True, name="rotation")
    rep = monodromy_report(f, PeriodicMap.zeros(2, 8), tol_nondeg=1e-4)
    assert rep.symmetry_defect < 1e-10
    assert rep.verdict is Verdict.DEGENERATE


def test_not_an_orbit_rejected():
    f = vf.logistic()
    with pytest.raises(NotAnOrbit):
        monodromy_report(f, PeriodicMap.constant(0.3, K=8))


def test_report_dict_is_plain_data(logistic_seed):
    d = logistic_seed[2].as_dict()
    assert d["verdict"] == "NonDegenerate"
    assert isinstance(d["multipliers"][0][0], float)
