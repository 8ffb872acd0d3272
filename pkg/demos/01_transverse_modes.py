"""Transverse modes of a lined strip.

On the unit strip 0 < v < 1 with a hard wall at v = 0 and an admittance
wall d/dv psi = i k Y psi at v = 1, the modes are cos(lambda v) with
lambda tan(lambda) = -i k Y.  They are not orthogonal, but they are
biorthogonal under the bilinear form int psi_m psi_n dv.
"""
import numpy as np
from scipy.integrate import quad

from wavecascade.transverse import biorthogonal_norm, expand_coeffs_many, solve_lambda

k = 10.0
for Y in (0.0, 0.5j, 0.5 + 0.5j):
    lam = solve_lambda(Y, k, 5)
    print(f"Y = {Y!s:>10}: lambda =", np.array2string(lam, precision=4))

# a hard wall gives n pi; the lining pulls the roots into the complex plane
lam = solve_lambda(0.5 + 0.5j, k, 6)
nrm = biorthogonal_norm(lam)
overlap = np.zeros((6, 6), complex)
for m in range(6):
    for n in range(6):
        f = lambda v, part: getattr(np.cos(lam[m] * v) * np.cos(lam[n] * v), part)
        overlap[m, n] = quad(f, 0, 1, args=("real",))[0] + 1j * quad(f, 0, 1, args=("imag",))[0]
print("\nlargest off-diagonal overlap:", np.abs(overlap - np.diag(np.diag(overlap))).max())
print("diagonal vs closed-form norm:", np.abs(np.diag(overlap) - nrm).max())

# coefficients of v sin(lambda_n v) and v^2 cos(lambda_n v) in the basis
alpha, beta = expand_coeffs_many(lam[None], nrm[None])
print("\nalpha[:3, :3] =\n", np.array2string(alpha[0, :3, :3], precision=4))
print("beta[:3, :3] =\n", np.array2string(beta[0, :3, :3], precision=4))
