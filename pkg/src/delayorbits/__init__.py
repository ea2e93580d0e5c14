"""Periodic orbits of delay equations, continued from non-degenerate undelayed orbits.

The package finds 1-periodic orbits of time-dependent vector fields,
certifies their non-degeneracy through Floquet multipliers and continues
them in the delay ``tau`` for ``x'(t) = X_t(x(t - tau))`` and for the
coefficient form ``x'(t) = f_t(x(t - tau)) X_t(x(t))``.
"""

from .continuation import (
    BranchPoint,
    OrbitBranch,
    StepControl,
    continue_branch,
    continue_both,
    smoothness_diagnostic,
    tangent,
    uniform_branch,
)
from .dde import HistorySegment, integrate_mos, periodicity_residual
from .errors import *  # noqa: F401,F403
from .fields import (
    DelayCoefficientField,
    LinearAffineField,
    VectorFieldSpec,
    autonomous_linear,
    delay_coefficient_logistic,
    forced_rotation,
    limit_cycle,
    linear_affine,
    logistic,
    self_test_jacobian,
    zero_field,
)
from .floquet import Verdict, cokernel_search, fundamental_system, monodromy_report
from .fourier import PeriodicMap
from .oracles import linear_delay_orbit, linear_delay_orbit_derivative
from .orbit import NewtonSettings, find_seed_orbit, newton_correct
from .section import SectionProblem, TangentVector, index_diagnostic, linearize, residual

__version__ = "0.1.0"
