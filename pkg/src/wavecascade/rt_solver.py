"""Reflection and transmission matrices of one block from the Riccati equations."""
import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import CoefficientTable
from .numcore import ODEProblem, integrate


@dataclass
class ScatteringMatrix:
    """R+/T+ act on right-going waves entering at u1; R-/T- on left-going waves entering at u2."""

    R_plus: np.ndarray
    R_minus: np.ndarray
    T_plus: np.ndarray
    T_minus: np.ndarray
    u1: float = 0.0
    u2: float = 0.0
    width_left: Optional[float] = None
    width_right: Optional[float] = None
    k: Optional[float] = None

    @property
    def N(self):
        return self.R_plus.shape[0]

    @classmethod
    def identity(cls, N, u=0.0, width=None, k=None):
        Z, I = np.zeros((N, N), complex), np.eye(N, dtype=complex)
        return cls(Z, Z.copy(), I, I.copy(), u, u, width, width, k)

    def mirrored(self):
        """The same block seen from the other side (left and right swapped)."""
        return ScatteringMatrix(self.R_minus, self.R_plus, self.T_minus, self.T_plus,
                                -self.u2, -self.u1, self.width_right, self.width_left, self.k)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["matrix", "m", "n", "re", "im"])
            for name in ("R_plus", "R_minus", "T_plus", "T_minus"):
                mat = getattr(self, name)
                for (m, n), z in np.ndenumerate(mat):
                    w.writerow([name, m, n, f"{z.real:.17g}", f"{z.imag:.17g}"])

    @classmethod
    def from_csv(cls, path, **meta):
        data = {}
        with open(path) as fh:
            for row in csv.DictReader(fh):
                data.setdefault(row["matrix"], []).append(
                    (int(row["m"]), int(row["n"]), float(row["re"]) + 1j * float(row["im"])))
        mats = {}
        for name, entries in data.items():
            N = max(max(e[0], e[1]) for e in entries) + 1
            mat = np.zeros((N, N), complex)
            for m, n, z in entries:
                mat[m, n] = z
            mats[name] = mat
        return cls(mats["R_plus"], mats["R_minus"], mats["T_plus"], mats["T_minus"], **meta)


def _rhs_plus(table, N):
    def f(u, y):
        J, K, L, M = table.JKLM(u)
        R = y[: N * N].reshape((N, N), order="F")
        T = y[N * N:].reshape((N, N), order="F")
        JKR = J + K @ R
        dR = -R @ JKR + L + M @ R
        dT = -T @ JKR
        return np.concatenate([dR.ravel(order="F"), dT.ravel(order="F")])
    return f


def _rhs_minus(table, N):
    def f(u, y):
        J, K, L, M = table.JKLM(u)
        R = y[: N * N].reshape((N, N), order="F")
        T = y[N * N:].reshape((N, N), order="F")
        MLR = M + L @ R
        dR = J @ R + K - R @ MLR
        dT = -T @ MLR
        return np.concatenate([dR.ravel(order="F"), dT.ravel(order="F")])
    return f


def _start(N):
    return np.concatenate([np.zeros(N * N, complex), np.eye(N, dtype=complex).ravel(order="F")])


def solve_rt(table: CoefficientTable, k=None, N=None, rel_tol=1e-8, abs_tol=1e-10, max_step=np.inf,
             widths=(None, None)):
    """Integrate the Riccati pair in both directions across the whole table."""
    N = table.N if N is None else N
    if N != table.N:
        raise ValueError("mode count does not match the table")
    u1, u2 = table.span
    plus = integrate(ODEProblem(_rhs_plus(table, N), (u2, u1), _start(N), rel_tol, abs_tol, max_step))
    minus = integrate(ODEProblem(_rhs_minus(table, N), (u1, u2), _start(N), rel_tol, abs_tol, max_step))
    yp, ym = plus.states[-1], minus.states[-1]
    nn = N * N
    unflat = lambda v: v.reshape((N, N), order="F")
    return ScatteringMatrix(
        R_plus=unflat(yp[:nn]), T_plus=unflat(yp[nn:]),
        R_minus=unflat(ym[:nn]), T_minus=unflat(ym[nn:]),
        u1=u1, u2=u2, width_left=widths[0], width_right=widths[1],
        k=table.k if k is None else k,
    )
