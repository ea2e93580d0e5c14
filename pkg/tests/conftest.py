import re

import numpy as np
import pytest

from delayorbits.continuation import BranchPoint, continue_both
from delayorbits.fields import linear_affine, logistic
from delayorbits.fourier import PeriodicMap
from delayorbits.orbit import find_seed_orbit
from delayorbits.section import SectionProblem

K_DEFAULT = 32

# b(t) with three nonzero modes; the scalar oracle problem is x' = a x(t - tau) + b(t)
LINEAR_MODES = {1: -0.5j, 2: 0.25, 3: 0.1 + 0.05j}


def linear_forcing(K=3):
    return PeriodicMap.from_modes(LINEAR_MODES, dim=1, K=K)


@pytest.fixture(scope="session")
def forcing():
    return linear_forcing()


@pytest.fixture(scope="session")
def linear_seed(forcing):
    field = linear_affine([[1.0]], forcing)
    x0, rep = find_seed_orbit(field, [0.0], K=K_DEFAULT)
    return field, x0, rep


@pytest.fixture(scope="session")
def linear_branch(linear_seed):
    field, x0, _ = linear_seed
    p = SectionProblem(field, K_DEFAULT)
    return p, continue_both(p, BranchPoint(0.0, x0), -0.3, 0.3)


@pytest.fixture(scope="session")
def logistic_seed():
    field = logistic()
    x0, rep = find_seed_orbit(field, [1.5], K=K_DEFAULT)
    return field, x0, rep


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary ---------------------------------------------------------

_ACCEPTANCE = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _NAME.search(report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    prev = _ACCEPTANCE.get(key, (m.group(2), True))
    ok = prev[1] and not report.failed
    if report.when == "call" or report.failed:
        _ACCEPTANCE[key] = (m.group(2), ok)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        name, ok = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:2d} {'PASS' if ok else 'FAIL'}  {name}")
