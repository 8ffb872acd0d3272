"""Dense complex linear algebra and adaptive Runge-Kutta integration.

Every solver in the package funnels through :func:`mat_solve` and
:func:`integrate`.  Matrix-valued ODEs are flattened column-major so the
integrator never needs to know the shape of the state.
"""
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.integrate import RK45

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
MIN_STEP = 1e-12


class SolverError(RuntimeError):
    """Base class for numerical failures inside the solvers."""


class SingularMatrix(SolverError):
    pass


class StepFailure(SolverError):
    """Raised when the adaptive step collapses; ``u`` is where it happened."""

    def __init__(self, message, u=None):
        super().__init__(message)
        self.u = u


def mat_solve(A, B):
    """Solve ``A X = B`` by LU with partial pivoting.

    Raises SingularMatrix when a pivot falls below ``1e-13 * ||A||``.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"mat_solve needs a square matrix, got {A.shape}")
    scale = np.linalg.norm(A, np.inf)
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)  # reported below as SingularMatrix
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    smallest = np.min(np.abs(np.diag(lu)))
    if smallest < 1e-13 * scale:
        raise SingularMatrix(f"pivot {smallest:.3e} below 1e-13*||A|| = {1e-13 * scale:.3e}")
    return scipy.linalg.lu_solve((lu, piv), B)


@dataclass
class ODEProblem:
    rhs: Callable[[float, np.ndarray], np.ndarray]
    span: Sequence[float]
    initial_state: np.ndarray
    rel_tol: float = DEFAULT_RTOL
    abs_tol: float = DEFAULT_ATOL
    max_step: float = np.inf

    def __post_init__(self):
        if self.span[0] == self.span[1]:
            raise ValueError("integration span endpoints must differ")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        self.initial_state = np.asarray(self.initial_state, dtype=complex).ravel(order="F")


@dataclass
class Trajectory:
    """States at the requested stations plus the step interpolants."""

    stations: np.ndarray
    states: np.ndarray  # shape (len(stations), n)
    n_steps: int
    _pieces: list = field(default_factory=list, repr=False)

    def __call__(self, u):
        """Evaluate the continuous (dense-output) solution at ``u``."""
        if not self._pieces:
            raise ValueError("trajectory was integrated without keep_dense=True")
        if not hasattr(self, "_lo"):
            self._pieces.sort(key=lambda p: p[0])
            self._lo = np.array([p[0] for p in self._pieces])
            self._hi = self._pieces[-1][1]
        if u < self._lo[0] - 1e-12 or u > self._hi + 1e-12:
            raise ValueError(f"u={u} outside the integrated span")
        i = max(int(np.searchsorted(self._lo, u, side="right")) - 1, 0)
        return self._pieces[i][2](u)


def integrate(problem: ODEProblem, stations: Optional[Sequence[float]] = None, keep_dense=False):
    """Dormand-Prince 5(4) with dense output at ``stations``.

    ``stations`` default to the span end point.  They may be given in any
    order but must lie inside the span.  Integration runs right-to-left when
    ``span[1] < span[0]``.
    """
    t0, t1 = float(problem.span[0]), float(problem.span[1])
    direction = np.sign(t1 - t0)
    if stations is None:
        stations = [t1]
    stations = np.asarray(stations, dtype=float)
    order = np.argsort(direction * stations, kind="stable")
    lo, hi = min(t0, t1), max(t0, t1)
    if np.any(stations < lo - 1e-12) or np.any(stations > hi + 1e-12):
        raise ValueError("stations must lie inside the integration span")

    y0 = problem.initial_state
    out = np.empty((len(stations), y0.size), dtype=complex)
    pieces = []

    solver = RK45(
        problem.rhs, t0, y0, t1,
        rtol=problem.rel_tol, atol=problem.abs_tol, max_step=problem.max_step,
    )
    # stations sitting on the start point
    k = 0
    while k < len(order) and direction * (stations[order[k]] - t0) <= 0:
        out[order[k]] = y0
        k += 1
    n_steps = 0
    while solver.status == "running":
        msg = solver.step()
        n_steps += 1
        if solver.status == "failed" or not np.all(np.isfinite(solver.y)):
            raise StepFailure(f"integration failed near u={solver.t:.6g}: {msg}", u=solver.t)
        if solver.status == "running" and solver.step_size < MIN_STEP:
            raise StepFailure(f"step size underflow ({solver.step_size:.2e}) at u={solver.t:.6g}", u=solver.t)
        t_old, t_new = solver.t_old, solver.t
        need = k < len(order) and direction * (stations[order[k]] - t_new) <= 0
        if need or keep_dense:
            dense = solver.dense_output()
            while k < len(order) and direction * (stations[order[k]] - t_new) <= 0:
                s = stations[order[k]]
                out[order[k]] = y0 if s == t0 else (solver.y if s == t_new else dense(s))
                k += 1
            if keep_dense:
                pieces.append((min(t_old, t_new), max(t_old, t_new), dense))
    while k < len(order):  # stations exactly at t1 after rounding
        out[order[k]] = solver.y
        k += 1
    return Trajectory(stations=stations, states=out, n_steps=n_steps, _pieces=pieces)


def as_matrix(flat, n):
    return flat.reshape(n, -1, order="F")


def flatten(mat):
    return np.asarray(mat).ravel(order="F")
