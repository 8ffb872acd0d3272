"""Independent check with a finite-difference solution of the strip problem.

The oracle discretizes the same mapped Helmholtz problem with a
second-order stencil and exact discrete radiation conditions, so its
error shrinks like h^2 while the modal pipeline converges in N.
"""
import warnings

from wavecascade.config import example_config
from wavecascade.fd_oracle import solve_chain
from wavecascade.pipeline import SolverSettings, solve_structure

warnings.simplefilter("ignore")
elements = example_config().elements
for k in (1.0, 3.0, 5.0):
    modal = abs(solve_structure(elements, k, SolverSettings(N=3)).end_field()[0])
    fd = abs(solve_chain(elements, k, cells_per_unit=40, nv=41).transmitted[0])
    print(f"k = {k}: |Phi_0| modal {modal:.5f}  FD {fd:.5f}  relative difference {abs(modal - fd) / fd:.1e}")
