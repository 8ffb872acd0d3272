"""Scattering matrices of single blocks from the Riccati equations.

A hard straight block only propagates: R = 0 and T = diag(exp(i alpha_n l)).
A lined straight block couples and damps the modes; a reactive lining
(purely imaginary admittance) conserves power.
"""
import numpy as np

from wavecascade.analysis import power_ratio
from wavecascade.assembly import build_table
from wavecascade.cascade import axial_wavenumbers
from wavecascade.presets import straight_block
from wavecascade.rt_solver import solve_rt

k, N = 10.0, 6
hard = straight_block(0.2, 1.0)
S = solve_rt(build_table(hard, k, N), rel_tol=1e-12, abs_tol=1e-14)
print("hard block: |R| max =", np.abs(S.R_plus).max(),
      " T error =", np.abs(np.diag(S.T_plus) - np.exp(1j * axial_wavenumbers(0.2, k, N))).max())

for beta in (0.5 + 0.5j, 0.5j):
    b = straight_block(0.5, 1.5, beta=beta)
    S = solve_rt(build_table(b, k, N, du=0.005), widths=b.end_widths)
    P = power_ratio(S, np.eye(N)[0], k).ratio
    print(f"lined block beta = {beta}: P = {P:.5f},  |R+ col 0| =",
          np.array2string(np.abs(S.R_plus[:3, 0]), precision=4))
