"""Coefficient matrices of the modal ODE  Phi'' - A Phi' - B^2 Phi = 0  on a u-grid.

The split-form matrices J, K, L, M use C = D = B_- + f(u)(B_+ - B_-),
which is diagonal, so (C + D)^-1 reduces to an entry-wise division.
"""
import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import ConformalBlock, admittance_Y
from .numcore import SingularMatrix, SolverError
from .transverse import (
    RootCollision,
    biorthogonal_norm,
    expand_coeffs_many,
    expand_mu_many,
    _gauss_mu,
    lambda_derivatives_many,
    solve_lambda_many,
)

log = logging.getLogger(__name__)

END_TOL = 1e-8


class EndStateWarning(UserWarning):
    """A block end is not straight enough for the decoupled end-state law."""


def asymptotic_B(B2_end):
    """Diagonal square root with positive real or negative imaginary entries."""
    b2 = np.real(np.diag(B2_end) if np.ndim(B2_end) == 2 else np.asarray(B2_end))
    b = np.where(b2 >= 0, np.sqrt(np.abs(b2)), -1j * np.sqrt(np.abs(b2)))
    return np.diag(b.astype(complex))


def blend_weight(u, window):
    """Raised-cosine step f(u) and f'(u) over ``window`` = (a, b)."""
    a, b = window
    s = np.clip((np.asarray(u, dtype=float) - a) / (b - a), 0.0, 1.0)
    f = 0.5 * (1 - np.cos(np.pi * s))
    inside = (s > 0) & (s < 1)
    fp = np.where(inside, 0.5 * np.pi * np.sin(np.pi * s) / (b - a), 0.0)
    return f, fp


def blend_CD(u, B_minus, B_plus, blend_window):
    """(C, C') at ``u``; C = D throughout."""
    f, fp = blend_weight(u, blend_window)
    d = B_plus - B_minus
    return B_minus + f * d, fp * d


def assemble_AB(lam, lam_p, lam_pp, alpha, beta, mu, k):
    """A and B^2 from the basis data; works on one station or a stack of them."""
    lam = np.asarray(lam)
    lp = np.asarray(lam_p)[..., None, :]
    lpp = np.asarray(lam_pp)[..., None, :]
    A = 2 * alpha * lp
    B2 = alpha * lpp + beta * lp**2 - k * k * mu
    idx = np.arange(lam.shape[-1])
    B2[..., idx, idx] += lam**2
    return A, B2


def assemble_JKLM(A, B2, C, Cp):
    """J, K, L, M for C = D (diagonal C given as a matrix or a vector)."""
    c = np.diag(C) if np.ndim(C) == 2 else np.asarray(C)
    cp = np.diag(Cp) if np.ndim(Cp) == 2 else np.asarray(Cp)
    two_c = 2 * c
    if np.min(np.abs(two_c)) < 1e-13 * max(np.max(np.abs(two_c)), 1e-300):
        raise SingularMatrix("C + D is singular (a mode sits exactly at cut-off)")
    inv = (1.0 / two_c)[:, None]
    AC = A * c[None, :]
    CC = np.diag(c * c)
    Cpm = np.diag(cp)
    J = inv * (-Cpm - B2 + AC - CC)
    K = inv * (Cpm - B2 - AC + CC)
    L = inv * (Cpm + B2 - AC - CC)
    M = inv * (-Cpm + B2 + AC + CC)
    return J, K, L, M


# --- geometry data cached across wavenumbers ---------------------------------

@dataclass
class _Geometry:
    us: np.ndarray
    Y: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    hard: np.ndarray
    mu_hard: dict = field(default_factory=dict)  # N -> (n_hard, N, N)
    mu_nodes: dict = field(default_factory=dict)  # q -> (n_soft, q)


@lru_cache(maxsize=16)
def _geometry(block: ConformalBlock, n_st: int):
    us = np.linspace(block.u_range[0], block.u_range[1], n_st)
    Y, Y1, Y2 = admittance_Y(block, us)
    hard = (Y == 0) & (Y1 == 0) & (Y2 == 0)
    return _Geometry(us, Y, Y1, Y2, hard)


def _mu_table(block, geo, lam, N):
    M = len(geo.us)
    out = np.empty((M, N, N), dtype=complex)
    if np.any(geo.hard):
        if N not in geo.mu_hard:
            geo.mu_hard[N] = expand_mu_many(block.map, geo.us[geo.hard], lam[geo.hard], np.ones(geo.hard.sum(), bool))
        out[geo.hard] = geo.mu_hard[N]
    soft = ~geo.hard
    if np.any(soft):
        us_s = geo.us[soft]

        def mu_fn(v):
            key = len(v)
            if key not in geo.mu_nodes:
                geo.mu_nodes[key] = np.abs(block.map.dF(us_s[:, None] + 1j * v[None, :])) ** 2
            return geo.mu_nodes[key]

        out[soft] = _gauss_mu(mu_fn, lam[soft], biorthogonal_norm(lam[soft]))
    return out


def _check_continuity(lam):
    """Families must move less between neighbouring stations than their mutual gap."""
    if lam.shape[1] < 2 or lam.shape[0] < 2:
        return
    jump = np.abs(np.diff(lam, axis=0))
    d = np.abs(lam[:, :, None] - lam[:, None, :])
    n = lam.shape[1]
    d[:, np.arange(n), np.arange(n)] = np.inf
    gap = d.min(axis=2)
    if np.any(jump > 0.5 * np.minimum(gap[1:], gap[:-1])):
        i = int(np.argmax((jump / np.minimum(gap[1:], gap[:-1])).max(axis=1)))
        raise RootCollision(f"eigenvalue family labelling jumps between stations {i} and {i + 1}")


@dataclass
class CoefficientTable:
    """A, B^2 sampled on a uniform grid plus the asymptotic end matrices."""

    u_grid: np.ndarray
    A_tab: np.ndarray
    B2_tab: np.ndarray
    B_minus: np.ndarray
    B_plus: np.ndarray
    blend_window: tuple
    k: float
    lam_tab: np.ndarray
    Y_tab: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.A_tab.shape[1]

    @property
    def span(self):
        return float(self.u_grid[0]), float(self.u_grid[-1])

    def _locate(self, u):
        g = self.u_grid
        if u < g[0] - 1e-12 or u > g[-1] + 1e-12:
            raise ValueError(f"u={u} outside the table")
        i = int(np.clip(np.searchsorted(g, u, side="right") - 1, 0, len(g) - 2))
        t = (u - g[i]) / (g[i + 1] - g[i])
        return i, t

    def _interp(self, tab, u):
        i, t = self._locate(u)
        if t == 0.0:
            return tab[i]
        if t == 1.0:
            return tab[i + 1]
        return (1 - t) * tab[i] + t * tab[i + 1]

    def A(self, u):
        return self._interp(self.A_tab, u)

    def B2(self, u):
        return self._interp(self.B2_tab, u)

    def lam(self, u):
        return self._interp(self.lam_tab, u)

    def C(self, u):
        return blend_CD(u, self.B_minus, self.B_plus, self.blend_window)

    def JKLM(self, u):
        A, B2 = self.A(u), self.B2(u)
        C, Cp = self.C(u)
        return assemble_JKLM(A, B2, C, Cp)

    def JKLM_tables(self):
        out = [assemble_JKLM(self.A_tab[i], self.B2_tab[i], *self.C(u)) for i, u in enumerate(self.u_grid)]
        return tuple(np.array(x) for x in zip(*out))

    def with_blend(self, window):
        return CoefficientTable(self.u_grid, self.A_tab, self.B2_tab, self.B_minus, self.B_plus,
                                tuple(window), self.k, self.lam_tab, self.Y_tab, dict(self.diagnostics))

    def restrict(self, u0, u1):
        """Sub-table on stations u0..u1 (both must be grid stations) with its own end matrices."""
        i0 = int(np.argmin(np.abs(self.u_grid - u0)))
        i1 = int(np.argmin(np.abs(self.u_grid - u1)))
        if abs(self.u_grid[i0] - u0) > 1e-9 or abs(self.u_grid[i1] - u1) > 1e-9 or i1 <= i0:
            raise ValueError("restriction bounds must be increasing grid stations")
        sl = slice(i0, i1 + 1)
        Bm, Bp = asymptotic_B(self.B2_tab[i0]), asymptotic_B(self.B2_tab[i1])
        w = 0.2 * (u1 - u0)
        mid = 0.5 * (u0 + u1)
        return CoefficientTable(self.u_grid[sl], self.A_tab[sl], self.B2_tab[sl], Bm, Bp,
                                (mid - w / 2, mid + w / 2), self.k, self.lam_tab[sl], self.Y_tab[sl])

    def to_csv(self, path):
        """Debug dump: one row per station with A and B^2 flattened (row-major, Re/Im pairs)."""
        N = self.N
        cols = ["u"] + [f"{name}_{m}_{n}_{p}" for name in ("A", "B2") for m in range(N)
                        for n in range(N) for p in ("re", "im")]
        rows = []
        for i, u in enumerate(self.u_grid):
            vals = [u]
            for tab in (self.A_tab, self.B2_tab):
                flat = tab[i].ravel()
                vals.extend(np.column_stack([flat.real, flat.imag]).ravel())
            rows.append(vals)
        np.savetxt(path, np.array(rows), delimiter=",", header=",".join(cols), comments="", fmt="%.17g")


def default_blend(u_range, fraction=0.2, center=None):
    u0, u1 = u_range
    mid = 0.5 * (u0 + u1) if center is None else center
    w = fraction * (u1 - u0)
    return (mid - w / 2, mid + w / 2)


def build_table(block: ConformalBlock, k, N, du=0.01, blend_window=None, strict=False):
    """Tabulate A and B^2 for ``block`` at wavenumber ``k`` with N modes."""
    if du <= 0:
        raise ValueError("du must be positive")
    if k <= 0 or N < 1:
        raise ValueError("need k > 0 and N >= 1")
    u0, u1 = block.u_range
    n_st = int(round((u1 - u0) / du)) + 1
    geo = _geometry(block, n_st)
    c = -1j * k * geo.Y
    lam = solve_lambda_many(c, N)
    _check_continuity(lam)
    lp, lpp = lambda_derivatives_many(lam, -1j * k * geo.Y1, -1j * k * geo.Y2)
    norms = biorthogonal_norm(lam)
    alpha, beta = expand_coeffs_many(lam, norms)
    mu = _mu_table(block, geo, lam, N)
    A, B2 = assemble_AB(lam, lp, lpp, alpha, beta, mu, k)
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(B2)):
        raise SolverError("non-finite coefficient matrices")

    diag = {}
    for name, i in (("left", 0), ("right", -1)):
        off = B2[i] - np.diag(np.diag(B2[i]))
        diag[f"{name}_A_norm"] = float(np.abs(A[i]).sum(axis=1).max())
        diag[f"{name}_B2_offdiag"] = float(np.abs(off).sum(axis=1).max())
    bad = [key for key, val in diag.items() if val > END_TOL]
    if bad:
        msg = f"{block.name}: end-state law violated ({', '.join(f'{b}={diag[b]:.1e}' for b in bad)})"
        if strict:
            raise SolverError(msg)
        warnings.warn(msg, EndStateWarning, stacklevel=2)
        log.info(msg)
    window = default_blend(block.u_range) if blend_window is None else tuple(blend_window)
    if not (u0 < window[0] < window[1] < u1):
        raise ValueError("blend window must lie inside the block")
    return CoefficientTable(geo.us, A, B2, asymptotic_B(B2[0]), asymptotic_B(B2[-1]), window,
                            float(k), lam, geo.Y, diag)
