"""Replay a Fourier orbit with the delay integrator.

The orbit's own history on [-tau, 0] is integrated forward for one period;
a solution returns to itself, a perturbed one does not.
"""

from delayorbits import fields as vf
from delayorbits.dde import periodicity_residual
from delayorbits.fourier import PeriodicMap
from delayorbits.oracles import linear_delay_orbit

forcing = PeriodicMap.from_modes({1: -0.5j, 2: 0.25, 3: 0.1 + 0.05j}, K=3)
field = vf.linear_affine([[1.0]], forcing)
tau = 0.3
x = linear_delay_orbit([[1.0]], forcing, tau, K=32)

for steps in (256, 512, 1024, 4096):
    print(f"steps/unit {steps:5d}  residual {periodicity_residual(field, x, tau, steps):.3e}")

bad = x + PeriodicMap.from_modes({2: 1e-2}, K=32)
print(f"perturbed orbit       residual {periodicity_residual(field, bad, tau):.3e}")
