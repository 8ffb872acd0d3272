"""Finite-difference reference solution of the strip problem.

Solves (d_uu + d_vv + k^2 mu) Phi = 0 on a chain of strip segments with
Phi_v = 0 at v = 0 and Phi_v = i k Y Phi at v = 1.  Both u-ends are closed
with the exact modal radiation condition of the discrete operator, so the
only approximation is the O(h^2) interior stencil.
"""
from dataclasses import dataclass
from typing import Callable, List, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .cascade import StraightGuide
from .geometry import ConformalBlock, admittance_Y
from .numcore import SolverError

RESOLUTION = 0.5
MIN_POINTS = 16


class GridTooCoarse(SolverError):
    pass


class SingularSystem(SolverError):
    pass


@dataclass(frozen=True)
class FDGrid:
    u_range: tuple
    nu: int
    nv: int

    def __post_init__(self):
        if self.nu < MIN_POINTS or self.nv < MIN_POINTS:
            raise GridTooCoarse(f"need at least {MIN_POINTS} points in each direction")

    @property
    def h_u(self):
        return (self.u_range[1] - self.u_range[0]) / (self.nu - 1)

    @property
    def h_v(self):
        return 1.0 / (self.nv - 1)


@dataclass
class _Segment:
    mu: Callable  # mu(u_array, v_array) -> array
    Y: Callable  # Y(u_array) -> array
    length: float
    width_left: float
    width_right: float


@dataclass
class FDResult:
    u: np.ndarray
    v: np.ndarray
    field: np.ndarray  # (nu, nv)
    incident: np.ndarray  # modal amplitudes of the incident wave at the left end
    reflected: np.ndarray
    transmitted: np.ndarray
    width_left: float
    width_right: float
    k: float

    def to_csv(self, path):
        U, V = np.meshgrid(self.u, self.v, indexing="ij")
        rows = np.column_stack([U.ravel(), V.ravel(), np.full(U.size, np.nan), np.full(U.size, np.nan),
                                self.field.real.ravel(), self.field.imag.ravel()])
        np.savetxt(path, rows, delimiter=",", header="u,v,x,y,re_phi,im_phi", comments="", fmt="%.17g")


def _segment(el, u_offset=0.0):
    if isinstance(el, StraightGuide):
        L = el.length / el.width
        w = el.width
        return _Segment(lambda u, v: np.full(np.broadcast(u, v).shape, w * w), lambda u: np.zeros_like(u),
                        L, w, w)
    u0, u1 = el.u_range
    cmap = el.map
    wl, wr = el.end_widths
    return _Segment(
        lambda u, v, u0=u0: np.abs(cmap.dF(u + u0 + 1j * v)) ** 2,
        lambda u, u0=u0: admittance_Y(el, u + u0)[0],
        u1 - u0, wl, wr,
    )


def _discrete_modes(nv):
    """Cosine eigenvectors of the Neumann second difference and a projector onto them."""
    J = nv - 1
    h = 1.0 / J
    j = np.arange(nv)
    n = np.arange(nv)
    C = np.cos(np.pi * np.outer(j, n) / J)  # (points, modes)
    w = np.full(nv, h)
    w[[0, -1]] = h / 2
    P = (C * w[:, None]).T / ((C**2) * w[:, None]).sum(axis=0)[:, None]
    kappa2 = (2 / h) ** 2 * np.sin(n * np.pi * h / 2) ** 2
    return C, P, kappa2


def _rho(B2, h):
    """Root of rho + 1/rho = 2 + h^2 B^2 describing a right-going / decaying wave."""
    t = 1 + 0.5 * h * h * B2.astype(complex)
    r = t - np.sqrt(t * t - 1)
    r2 = 1 / r
    prop = np.abs(t.real) < 1
    # propagating: pick exp(+i theta) with theta in (0, pi); evanescent: |rho| < 1
    pick = np.where(prop, np.where(r.imag > 0, r, r2), np.where(np.abs(r) < 1, r, r2))
    return pick


def solve_chain(elements: Sequence[Union[ConformalBlock, StraightGuide]], k, incident_mode=0,
                cells_per_unit=40, nv=41, incident=None, check=True):
    """FD solution on the concatenated strips of ``elements``; left-incident wave."""
    segs: List[_Segment] = [_segment(el) for el in elements]
    h_v = 1.0 / (nv - 1)
    # per-segment uniform spacing; seams use the non-uniform three-point stencil
    us, mus, Ys = [], [], []
    v = np.linspace(0.0, 1.0, nv)
    offset = 0.0
    for s_i, s in enumerate(segs):
        n = max(int(np.ceil(s.length * cells_per_unit)), 2)
        loc = np.linspace(0.0, s.length, n + 1)
        if s_i > 0:
            loc = loc[1:]
        us.append(loc + offset)
        mus.append(s.mu(loc[:, None], v[None, :]))
        Ys.append(s.Y(loc))
        offset += s.length
    u = np.concatenate(us)
    mu = np.vstack(mus)
    Y = np.concatenate(Ys)
    nu = len(u)
    h_max = max(np.diff(u).max(), h_v)
    if check and h_max * k * np.sqrt(mu.max()) >= RESOLUTION:
        raise GridTooCoarse(f"h k sqrt(mu) = {h_max * k * np.sqrt(mu.max()):.3f} >= {RESOLUTION}")
    if nu < MIN_POINTS or nv < MIN_POINTS:
        raise GridTooCoarse("grid has fewer than 16 points in a direction")

    C, P, kappa2 = _discrete_modes(nv)
    wl, wr = segs[0].width_left, segs[-1].width_right
    hl, hr = u[1] - u[0], u[-1] - u[-2]
    rho_l = _rho(kappa2 - k * k * wl * wl, hl)
    rho_r = _rho(kappa2 - k * k * wr * wr, hr)

    idx = lambda i, j: i * nv + j
    n_unk = nu * nv
    rows, cols, vals = [], [], []
    rhs = np.zeros(n_unk, dtype=complex)

    def add(r, c, x):
        rows.append(r)
        cols.append(c)
        vals.append(x)

    inv_hv2 = 1.0 / h_v**2
    for i in range(nu):
        hm = u[i] - u[i - 1] if i > 0 else hl
        hp = u[i + 1] - u[i] if i < nu - 1 else hr
        cm = 2.0 / (hm * (hm + hp))
        cp = 2.0 / (hp * (hm + hp))
        cc = -2.0 / (hm * hp)
        for j in range(nv):
            r = idx(i, j)
            diag = cc - 2 * inv_hv2 + k * k * mu[i, j]
            # v-direction with ghost points
            if j == 0:
                add(r, idx(i, 1), 2 * inv_hv2)
            elif j == nv - 1:
                add(r, idx(i, j - 1), 2 * inv_hv2)
                diag += 2 * h_v * 1j * k * Y[i] * inv_hv2
            else:
                add(r, idx(i, j - 1), inv_hv2)
                add(r, idx(i, j + 1), inv_hv2)
            if i > 0:
                add(r, idx(i - 1, j), cm)
            if i < nu - 1:
                add(r, idx(i + 1, j), cp)
            add(r, r, diag)

    # ghost columns: Phi_ghost = G Phi_end (+ incident forcing on the left)
    G_l = C @ (rho_l[:, None] * P)
    G_r = C @ (rho_r[:, None] * P)
    inc = np.zeros(nv, dtype=complex)
    if incident is None:
        inc[incident_mode] = 1.0
    else:
        inc[: len(incident)] = incident
    for j in range(nv):
        for jj in range(nv):
            add(idx(0, j), idx(0, jj), G_l[j, jj] / hl**2)
            add(idx(nu - 1, j), idx(nu - 1, jj), G_r[j, jj] / hr**2)
    forcing = C @ (inc * (1 / rho_l - rho_l))
    rhs[:nv] -= forcing / hl**2

    A = sp.csc_matrix((vals, (rows, cols)), shape=(n_unk, n_unk))
    try:
        lu = splu(A)
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    phi = lu.solve(rhs)
    if not np.all(np.isfinite(phi)):
        raise SingularSystem("non-finite FD solution")
    field = phi.reshape(nu, nv)
    left = P @ field[0]
    right = P @ field[-1]
    return FDResult(u, v, field, inc, left - inc, right, wl, wr, float(k))


def solve_reference(block, k, incident_mode=0, grid: FDGrid = None, **kw):
    """Single-block convenience wrapper; ``grid`` fixes the point counts."""
    if grid is not None:
        L = block.u_range[1] - block.u_range[0] if isinstance(block, ConformalBlock) else block.length / block.width
        kw.setdefault("cells_per_unit", (grid.nu - 1) / L)
        kw.setdefault("nv", grid.nv)
    return solve_chain([block], k, incident_mode, **kw)
