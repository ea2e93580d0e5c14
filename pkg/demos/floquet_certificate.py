"""Floquet certificate of a seed orbit.

The scalar problem x' = x + b(t) has the monodromy e; the undelayed limit
cycle has a trivial multiplier 1 and is flagged degenerate.
"""

from delayorbits import fields as vf
from delayorbits.floquet import cokernel_search
from delayorbits.fourier import PeriodicMap
from delayorbits.orbit import find_seed_orbit

forcing = PeriodicMap.from_modes({1: -0.5j, 2: 0.25, 3: 0.1 + 0.05j}, K=3)
cases = [
    ("x' = x + b(t)", vf.linear_affine([[1.0]], forcing), [0.0]),
    ("limit cycle", vf.limit_cycle(), [1.0, 0.0]),
]
for label, field, guess in cases:
    x0, rep = find_seed_orbit(field, guess, K=32)
    print(label)
    print("  multipliers          ", rep.multipliers)
    print("  distance to 1        ", f"{rep.min_dist_to_one:.3e}")
    print("  adjoint defect       ", f"{rep.adjoint_defect:.3e}")
    print("  two-route defect     ", f"{rep.two_route_defect:.3e}")
    print("  cokernel candidates  ", len(cokernel_search(field, x0)))
    print("  verdict              ", rep.verdict.value)
