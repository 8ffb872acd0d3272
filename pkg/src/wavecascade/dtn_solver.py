"""Dirichlet-to-Neumann operators of a block and the modal field they carry.

Lambda_R maps Phi_R to -Phi_R' (waves heading right), Lambda_L maps Phi_L to
Phi_L'.  With no sources to the right, Phi = Phi_R and Phi' = -Lambda_R Phi.
"""
import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import CoefficientTable
from .numcore import ODEProblem, StepFailure, integrate, mat_solve

log = logging.getLogger(__name__)


@dataclass
class DtNSolution:
    u_grid: np.ndarray
    LambdaR_tab: np.ndarray
    LambdaL_tab: Optional[np.ndarray]
    Phi_tab: Optional[np.ndarray] = None


@dataclass
class FieldMap:
    """Rows of (u, v, x, y, Phi)."""

    samples: np.ndarray  # columns u, v, x, y (float) and Phi (complex) stored as complex array

    @property
    def u(self):
        return self.samples[:, 0].real

    @property
    def v(self):
        return self.samples[:, 1].real

    @property
    def phi(self):
        return self.samples[:, 4]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "x", "y", "re_phi", "im_phi"])
            for u, v, x, y, p in self.samples:
                w.writerow([f"{u.real:.17g}", f"{v.real:.17g}", f"{x.real:.17g}", f"{y.real:.17g}",
                            f"{p.real:.17g}", f"{p.imag:.17g}"])


def _integrate_retry(problem, stations, keep_dense):
    try:
        return integrate(problem, stations, keep_dense)
    except StepFailure as exc:
        log.warning("DtN integration failed near u=%s; retrying with a smaller step cap", exc.u)
        span = abs(problem.span[1] - problem.span[0])
        cap = min(problem.max_step, span) / 10
        retry = ODEProblem(problem.rhs, problem.span, problem.initial_state,
                           problem.rel_tol, problem.abs_tol, cap)
        return integrate(retry, stations, keep_dense)


def _flat(m):
    return np.asarray(m, dtype=complex).ravel(order="F")


def _mat(y, N):
    return y.reshape((N, N), order="F")


def solve_lambda_R(table: CoefficientTable, Lambda_end=None, rel_tol=1e-8, abs_tol=1e-10):
    """Integrate Lambda_R' = (A + Lambda_R) Lambda_R - B^2 from the right end leftwards."""
    N = table.N
    u1, u2 = table.span
    start = table.B_plus if Lambda_end is None else Lambda_end

    def rhs(u, y):
        L = _mat(y, N)
        return _flat((table.A(u) + L) @ L - table.B2(u))

    return _integrate_retry(ODEProblem(rhs, (u2, u1), _flat(start), rel_tol, abs_tol),
                            table.u_grid, keep_dense=True)


def solve_lambda_L(table: CoefficientTable, Lambda_start=None, rel_tol=1e-8, abs_tol=1e-10):
    """Integrate Lambda_L' = (A - Lambda_L) Lambda_L + B^2 from the left end rightwards."""
    N = table.N
    u1, u2 = table.span
    start = table.B_minus if Lambda_start is None else Lambda_start

    def rhs(u, y):
        L = _mat(y, N)
        return _flat((table.A(u) - L) @ L + table.B2(u))

    return _integrate_retry(ODEProblem(rhs, (u1, u2), _flat(start), rel_tol, abs_tol),
                            table.u_grid, keep_dense=True)


def solve_dtn_operators(table: CoefficientTable, k=None, N=None, rel_tol=1e-8, abs_tol=1e-10):
    """Tabulated Lambda_R and Lambda_L on the table stations, shape (M, N, N) each."""
    N = table.N
    tr = solve_lambda_R(table, rel_tol=rel_tol, abs_tol=abs_tol)
    tl = solve_lambda_L(table, rel_tol=rel_tol, abs_tol=abs_tol)
    to_tab = lambda traj: np.array([_mat(s, N) for s in traj.states])
    return to_tab(tr), to_tab(tl)


def reflection_from_dtn(B, Lam):
    """Reflection seen by waves arriving through a straight section with operator B.

    Phi = (I + R) Phi+ and Phi' = -Lam Phi give (B + Lam) R = B - Lam.
    """
    return mat_solve(B + Lam, B - Lam)


def dtn_from_reflection(B, R):
    """Inverse of ``reflection_from_dtn``: Lam = B (I - R)(I + R)^-1."""
    I = np.eye(B.shape[0], dtype=complex)
    return mat_solve((I + R).T, (B @ (I - R)).T).T


def propagate_field(table: CoefficientTable, LambdaR, phi_start, rel_tol=1e-8, abs_tol=1e-10, stations=None):
    """Phi' = -Lambda_R Phi from the left end, given the total field vector there.

    ``LambdaR`` is a trajectory from ``solve_lambda_R`` (dense output is used).
    """
    N = table.N
    u1, u2 = table.span

    def rhs(u, y):
        return -_mat(LambdaR(u), N) @ y

    st = table.u_grid if stations is None else stations
    traj = _integrate_retry(ODEProblem(rhs, (u1, u2), np.asarray(phi_start, complex), rel_tol, abs_tol),
                            st, keep_dense=False)
    return traj.states


def propagate_field_left(table: CoefficientTable, LambdaL, phi_end, rel_tol=1e-8, abs_tol=1e-10, stations=None):
    """Phi_L' = Lambda_L Phi_L from the right end leftwards (sources on the right)."""
    N = table.N
    u1, u2 = table.span

    def rhs(u, y):
        return _mat(LambdaL(u), N) @ y

    st = table.u_grid if stations is None else stations
    traj = _integrate_retry(ODEProblem(rhs, (u2, u1), np.asarray(phi_end, complex), rel_tol, abs_tol),
                            st, keep_dense=False)
    return traj.states


def solve_block_field(table: CoefficientTable, phi_plus, Lambda_end=None, rel_tol=1e-8, abs_tol=1e-10):
    """Field in one block for a right-going wave ``phi_plus`` arriving at the left end.

    ``Lambda_end`` closes the right end (defaults to an anechoic straight guide).
    Returns the DtN solution and the reflection matrix seen at the left end.
    """
    N = table.N
    tr = solve_lambda_R(table, Lambda_end, rel_tol, abs_tol)
    lam_tab = np.array([_mat(s, N) for s in tr.states])
    R = reflection_from_dtn(table.B_minus, lam_tab[0])
    phi0 = (np.eye(N) + R) @ np.asarray(phi_plus, complex)
    phi = propagate_field(table, tr, phi0, rel_tol, abs_tol)
    return DtNSolution(table.u_grid, lam_tab, None, phi), R


def reconstruct_field(Phi_tab, table: CoefficientTable, cmap, v_grid, xy=True):
    """Phi(u, v) = sum_n Phi_n(u) cos(v lambda_n(u)) on the table stations times ``v_grid``."""
    v = np.asarray(v_grid, dtype=float)
    us = table.u_grid
    psi = np.cos(table.lam_tab[:, None, :] * v[None, :, None])  # (M, V, N)
    phi = np.einsum("mvn,mn->mv", psi, Phi_tab)
    U, V = np.meshgrid(us, v, indexing="ij")
    if xy:
        Z = _image_grid(cmap, us, v)
    else:
        Z = np.full(U.shape, np.nan + 0j)
    rows = np.column_stack([U.ravel(), V.ravel(), Z.real.ravel(), Z.imag.ravel(), phi.ravel()])
    return FieldMap(rows.astype(complex))


def _image_grid(cmap, us, vs):
    """Map images on a (u, v) grid by chaining short quadratures from one base point."""
    Z = np.empty((len(us), len(vs)), dtype=complex)
    z = cmap.point(complex(us[0], 0.0))
    for i, u in enumerate(us):
        if i:
            z = z + cmap._segment(complex(us[i - 1], 0.0), complex(u, 0.0))
        zc, vprev = z, 0.0
        for j, v in enumerate(vs):
            zc = zc + cmap._segment(complex(u, vprev), complex(u, v))
            Z[i, j] = zc
            vprev = v
    return Z
