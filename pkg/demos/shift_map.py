"""Delay shift on Fourier coefficients.

Shifting is an isometry at every Sobolev level, but it is not continuous in
operator norm: near any T > 0 there is a pure mode moved by a distance of
order one.
"""

import numpy as np

from delayorbits.fourier import PeriodicMap, high_frequency_witness

x = PeriodicMap.from_modes({1: 0.5, 3: 0.2 - 0.1j}, K=8)
for tau in (0.1, 0.37, -0.25):
    y = x.shift(tau)
    print(f"tau={tau:+.2f}  |x|_0={x.sobolev_norm(0):.15f}  |x(.-tau)|_0={y.sobolev_norm(0):.15f}")

# shifting by tau and evaluating at t is the same as evaluating at t - tau
t = np.linspace(0, 1, 5)
print("max |x_tau(t) - x(t - tau)| =", np.max(np.abs(x.shift(0.37)(t) - x(t - 0.37))))

for T in (0.5, 0.1, 0.01):
    mode, gap = high_frequency_witness(T, K=64)
    k = abs(mode.wavenumbers[np.argmax(np.abs(mode.coeffs[0]))])
    print(f"T={T:<5} witness mode k={k:<3d} |shift_T e - e|_0 = {gap:.4f}")
