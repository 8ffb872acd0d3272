"""Transverse eigenfunctions cos(v lambda_n) on 0 <= v <= 1 with an admittance wall at v = 1.

The eigenvalues solve lambda tan(lambda) = -i k Y, written here as
lambda tan(lambda) = c.  Families are labelled by continuation from the
hard-wall roots n*pi.  The basis is not orthogonal but biorthogonal under
the bilinear form <f, g> = int_0^1 f g dv (no conjugation).
"""
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct
from scipy.special import factorial

from .numcore import SolverError

NEWTON_MAX = 50
COLLISION_TOL = 1e-8
DEGENERATE_Q = 1e-10
ORIGIN_TOL = 1e-6  # roots this close to 0 are the continuation of the n = 0 hard-wall root
SERIES_CUT = 1.0  # |p| below which the moment integrals use their Taylor series
_N_SERIES = 16


class RootCollision(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class DegenerateQ(SolverError):
    pass


class QuadratureFailure(SolverError):
    pass


@dataclass(frozen=True)
class TransverseBasis:
    u: float
    lam: np.ndarray
    lam_p: np.ndarray
    lam_pp: np.ndarray
    norms: np.ndarray
    hard: bool = False  # True when lam is exactly n*pi

    @property
    def N(self):
        return len(self.lam)

    def psi(self, v):
        """Basis functions at points ``v``; shape (len(v), N)."""
        return np.cos(np.outer(np.atleast_1d(v), self.lam))


# --- eigenvalues -------------------------------------------------------------

def _g(lam, c):
    return lam * np.sin(lam) - c * np.cos(lam)


def _dg(lam, c):
    return np.sin(lam) + lam * np.cos(lam) + c * np.sin(lam)


def _canonical(lam):
    # only lambda_0^2 matters; fix the sign so lambda_0 is in the right half plane
    l0 = lam[..., 0]
    flip = (l0.real < 0) | ((l0.real == 0) & (l0.imag < 0))
    lam[..., 0] = np.where(flip, -l0, l0)
    return lam


def _newton(lam, c, tol=1e-15):
    for _ in range(NEWTON_MAX):
        step = _g(lam, c) / _dg(lam, c)
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        lam = lam - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(lam))):
            return lam
    raise NoConvergence("Newton iteration for the transverse eigenvalues did not converge")


def _seed(c, n):
    c = np.asarray(c, dtype=complex)[..., None]
    lam = np.where(n == 0, np.sqrt(c), n * np.pi + c / np.where(n == 0, 1.0, n * np.pi))
    return lam


def _collides(lam):
    """Per-station mask of root pairs closer than COLLISION_TOL."""
    if lam.shape[-1] < 2:
        return np.zeros(lam.shape[:-1], dtype=bool)
    d = np.abs(lam[..., :, None] - lam[..., None, :])
    n = lam.shape[-1]
    d[..., np.arange(n), np.arange(n)] = np.inf
    return (d < COLLISION_TOL).any(axis=(-2, -1))


def _check(lam, c):
    res = np.abs(lam * np.tan(lam) - c) / np.maximum(1.0, np.abs(lam) ** 2)
    # near a pole of tan the form above is ill-conditioned; accept a small backward error instead
    backward = np.abs(_g(lam, c)) / (np.abs(lam * np.sin(lam)) + np.abs(c * np.cos(lam)))
    bad = ~(np.nan_to_num(res, nan=np.inf) < 1e-10) & ~(backward < 1e-13)
    if np.any(bad):
        raise NoConvergence(f"eigenvalue residual {np.nanmax(np.where(bad, res, 0)):.2e} exceeds 1e-10")
    if np.any(_collides(lam)):
        raise RootCollision("two eigenvalue families are closer than 1e-8")


def _continue(cs, n, steps, bend=0.0):
    """Track the hard-wall roots along c(t) = t c (1 + i bend (1 - t)), t in (0, 1]."""
    def path(t):
        return cs * t * (1 + 1j * bend * (1 - t))

    lam = _seed(path(1 / steps), n)
    for j in range(1, steps + 1):
        lam = _newton(lam, path(j / steps)[..., None])
        if j < steps:
            # first-order predictor for the next sub-step
            dc = path((j + 1) / steps) - path(j / steps)
            lam = lam + dc[..., None] / (np.tan(lam) + lam * (1 + np.tan(lam) ** 2))
    return lam


def solve_lambda_many(c, N, seed=None):
    """Eigenvalues for an array of c = -i k Y values; result shape c.shape + (N,).

    Without a seed each station is continued along t*c, t in (0, 1], from the
    hard-wall roots, so the labelling does not depend on neighbouring stations.
    A straight path that grazes a double root (where two families meet) can
    send two families onto one root; such stations are redone along a bent path.
    """
    c = np.asarray(c, dtype=complex)
    n = np.arange(N)
    out = np.empty(c.shape + (N,), dtype=complex)
    hard = c == 0
    out[hard] = n * np.pi
    soft = ~hard
    if not np.any(soft):
        return out
    cs = c[soft]
    if seed is not None:
        lam = np.asarray(seed, dtype=complex).reshape(cs.shape + (N,)).copy()
        lam = _newton(lam, cs[..., None])
    else:
        steps = int(max(4, np.ceil(3 * np.abs(cs).max())))
        lam = _continue(cs, n, steps)
        for bend in (0.3, -0.3):
            bad = _collides(lam)
            if not np.any(bad):
                break
            lam[bad] = _continue(cs[bad], n, 2 * steps, bend)
    lam = _canonical(lam)
    _check(lam, cs[..., None])
    out[soft] = lam
    return out


def solve_lambda(Y, k, N, seed=None):
    """The first N eigenvalue families for admittance ``Y`` and wavenumber ``k``."""
    if k <= 0:
        raise ValueError("k must be positive")
    if N < 1:
        raise ValueError("need at least one mode")
    return solve_lambda_many(np.array([-1j * k * complex(Y)]), N, seed)[0]


def lambda_derivatives_many(lam, c1, c2):
    """u-derivatives of lambda given c' and c'' (c = -i k Y), vectorized over stations."""
    lam = np.asarray(lam, dtype=complex)
    c1 = np.asarray(c1, dtype=complex)[..., None]
    c2 = np.asarray(c2, dtype=complex)[..., None]
    t = np.tan(lam)
    Q = t + lam * (1 + t * t)
    still = (c1 == 0) & (c2 == 0)
    # at the origin Q ~ 2 lam is small but not degenerate: lam ~ sqrt(c) there and the
    # coefficients that multiply lam' and lam'' vanish with lam
    origin = np.abs(lam) < ORIGIN_TOL
    still = np.broadcast_to(still, lam.shape) | (Q == 0) & origin
    small = np.abs(Q) < DEGENERATE_Q
    if np.any(small & ~still & ~origin):
        raise DegenerateQ("|Q| < 1e-10: double eigenvalue at this station")
    Qs = np.where(still, 1.0, Q)
    lp = np.where(still, 0.0, c1 / Qs)
    dQ = lp * (1 + t * t) * (2 + 2 * lam * t)
    lpp = np.where(still, 0.0, (c2 * Qs - c1 * dQ) / Qs**2)
    return lp, lpp


def lambda_derivatives(lam, Y1, Y2, k):
    """(lambda', lambda'') for one eigenvalue or vector of eigenvalues."""
    lam = np.asarray(lam, dtype=complex)
    lp, lpp = lambda_derivatives_many(lam[None, ...] if lam.ndim else lam[None, None],
                                      np.array([-1j * k * Y1]), np.array([-1j * k * Y2]))
    if lam.ndim == 0:
        return complex(lp[0, 0]), complex(lpp[0, 0])
    return lp[0], lpp[0]


def biorthogonal_norm(lam):
    """<psi, psi> = int_0^1 cos^2(lam v) dv."""
    lam = np.asarray(lam, dtype=complex)
    small = np.abs(lam) < 1e-3
    safe = np.where(small, 1.0, lam)
    out = np.where(small, 1 - lam**2 / 3 + lam**4 / 15, 0.5 + np.sin(2 * safe) / (4 * safe))
    return out if out.ndim else complex(out)


def build_basis(u, Y, Y1, Y2, k, N, seed=None):
    c = -1j * k * complex(Y)
    lam = solve_lambda_many(np.array([c]), N, seed)[0]
    lp, lpp = lambda_derivatives_many(lam[None], np.array([-1j * k * Y1]), np.array([-1j * k * Y2]))
    return TransverseBasis(float(u), lam, lp[0], lpp[0], biorthogonal_norm(lam), hard=(c == 0))


# --- expansion coefficients --------------------------------------------------

_kk = np.arange(_N_SERIES)
_S1 = (-1.0) ** _kk / (factorial(2 * _kk + 1) * (2 * _kk + 3))
_S2 = (-1.0) ** _kk / (factorial(2 * _kk) * (2 * _kk + 3))


def _moment1(p):
    """int_0^1 v sin(p v) dv."""
    small = np.abs(p) < SERIES_CUT
    ps = np.where(small, 1.0, p)
    closed = np.sin(ps) / ps**2 - np.cos(ps) / ps
    p2 = p * p
    series = p * np.polynomial.polynomial.polyval(p2, _S1)
    return np.where(small, series, closed)


def _moment2(p):
    """int_0^1 v^2 cos(p v) dv."""
    small = np.abs(p) < SERIES_CUT
    ps = np.where(small, 1.0, p)
    closed = np.sin(ps) / ps + 2 * np.cos(ps) / ps**2 - 2 * np.sin(ps) / ps**3
    series = np.polynomial.polynomial.polyval(p * p, _S2)
    return np.where(small, series, closed)


def expand_coeffs_many(lam, norms=None):
    """alpha_mn, beta_mn for stacked eigenvalues ``lam`` (..., N); m is the row index.

    v sin(v lam_n) = sum_m alpha_mn cos(v lam_m),  v^2 cos(v lam_n) = sum_m beta_mn cos(v lam_m).
    """
    lam = np.asarray(lam, dtype=complex)
    if norms is None:
        norms = biorthogonal_norm(lam)
    ln = lam[..., None, :]
    lm = lam[..., :, None]
    s, d = ln + lm, ln - lm
    nm = np.asarray(norms)[..., :, None]
    alpha = 0.5 * (_moment1(s) + _moment1(d)) / nm
    beta = 0.5 * (_moment2(s) + _moment2(d)) / nm
    return alpha, beta


def expand_coeffs(basis: TransverseBasis):
    return expand_coeffs_many(basis.lam, basis.norms)


# --- metric expansion ---------------------------------------------------------

def _gauss_mu(mu_fn, lam, norms, q0=32, q_max=2048, tol=1e-10):
    """<mu psi_n, psi_m>/<psi_m, psi_m> for stacked lam (M, N) with Gauss-Legendre doubling.

    ``mu_fn(v)`` returns mu at nodes v with shape (M, len(v)).
    """
    prev = None
    q = q0
    while q <= q_max:
        x, w = np.polynomial.legendre.leggauss(q)
        v = 0.5 * (x + 1)
        w = 0.5 * w
        mu = mu_fn(v)
        C = np.cos(lam[:, None, :] * v[None, :, None])  # (M, q, N)
        wm = (w[None, :] * mu)[:, :, None] * C
        mat = np.einsum("mqi,mqj->mij", C, wm) / norms[:, :, None]
        if prev is not None and np.max(np.abs(mat - prev)) < tol:
            return mat
        prev = mat
        q *= 2
    raise QuadratureFailure("Gauss-Legendre refinement of mu_mn did not reach 1e-10")


def _dct_mu(mu_samples, mu_v0, mu_v1, N):
    """Hard-wall mu_mn from samples of mu on a uniform v-grid (rows are stations).

    Trapezoid cosine moments c_j = int mu cos(j pi v) via DCT-I, with the
    leading Euler-Maclaurin endpoint correction.
    """
    n_pts = mu_samples.shape[-1]
    h = 1.0 / (n_pts - 1)
    c = dct(mu_samples, type=1, axis=-1) * (h / 2)
    j = np.arange(n_pts)
    c = c - h * h / 12 * (mu_v1[:, None] * (-1.0) ** j - mu_v0[:, None])
    idx_s = np.arange(N)[None, :] + np.arange(N)[:, None]
    idx_d = np.abs(np.arange(N)[None, :] - np.arange(N)[:, None])
    norms = np.where(np.arange(N) == 0, 1.0, 0.5)
    return 0.5 * (c[:, idx_s] + c[:, idx_d]) / norms[None, :, None]


def expand_mu_many(cmap, us, lam, hard, n_fft=4096):
    """mu_mn at stations ``us`` given eigenvalues (M, N); ``hard`` marks lam == n pi rows."""
    us = np.asarray(us, dtype=float)
    lam = np.asarray(lam, dtype=complex)
    M, N = lam.shape
    out = np.empty((M, N, N), dtype=complex)
    hard = np.asarray(hard, dtype=bool)
    if np.any(hard):
        uh = us[hard]
        v = np.linspace(0.0, 1.0, max(n_fft, 4 * N) + 1)
        mu = np.abs(cmap.dF(uh[:, None] + 1j * v[None, :])) ** 2
        from .geometry import metric_mu_dv
        out[hard] = _dct_mu(mu, metric_mu_dv(cmap, uh, 0.0), metric_mu_dv(cmap, uh, 1.0), N)
    soft = ~hard
    if np.any(soft):
        us_s = us[soft]
        out[soft] = _gauss_mu(
            lambda v: np.abs(cmap.dF(us_s[:, None] + 1j * v[None, :])) ** 2,
            lam[soft], biorthogonal_norm(lam[soft]),
        )
    return out


def expand_mu(basis: TransverseBasis, cmap, u=None, method="auto"):
    """mu_mn at one station; ``method`` is "auto", "quadrature" or "fft"."""
    u = basis.u if u is None else u
    lam = basis.lam[None]
    if method == "quadrature" or (method == "auto" and not basis.hard):
        return _gauss_mu(lambda v: np.abs(cmap.dF(u + 1j * v[None, :])) ** 2,
                         lam, biorthogonal_norm(lam))[0]
    if not basis.hard:
        raise ValueError("the cosine-transform path needs the hard-wall basis")
    return expand_mu_many(cmap, [u], lam, [True])[0]
