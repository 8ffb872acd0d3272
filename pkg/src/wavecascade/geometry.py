"""Conformal maps from the strip {0 <= v <= 1} to waveguide blocks.

Each map exposes its derivative F' in closed form together with F'' and
F''' (obtained by differentiating the logarithm of the integrand).  Points
are found by integrating F' along a straight segment of the strip from a
base point whose image is known.

The upper strip wall v = 1 carries the normal admittance; v = 0 is hard.
"""
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .numcore import SolverError

STRAIGHTNESS_TOL = 1e-6


class QuadratureFailure(SolverError):
    pass


def _log_upper(z):
    """Logarithm with its cut along the negative imaginary axis.

    Arguments of the curve factors stay in the closed upper half plane, where
    the principal branch would flicker on the negative real axis.
    """
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    ang = np.where(ang < -np.pi / 2, ang + 2 * np.pi, ang)
    return np.log(np.abs(z)) + 1j * ang


class ConformalMap:
    kind = "abstract"
    base = 0j  # strip point whose image is z0
    z0 = 0j

    def derivatives(self, w):
        """Return (F', F'', F''') at strip points ``w``."""
        raise NotImplementedError

    def dF(self, w):
        return self.derivatives(w)[0]

    def point(self, w):
        """Image of a single strip point, by Gauss-Kronrod quadrature of F'."""
        return self.z0 + self._segment(self.base, complex(w))

    def points(self, ws):
        ws = np.asarray(ws, dtype=complex)
        return np.array([self.point(w) for w in ws.ravel()]).reshape(ws.shape)

    def _segment(self, w_start, w_end, epsabs=1e-12):
        d = w_end - w_start
        if d == 0:
            return 0j
        parts = []
        for comp in (np.real, np.imag):
            val, err, info = quad(
                lambda t: comp(self.dF(w_start + t * d) * d), 0.0, 1.0,
                epsabs=epsabs, epsrel=1e-12, limit=400, full_output=1,
            )[:3]
            if err > 1e-8 * max(1.0, abs(val)):
                raise QuadratureFailure(f"quadrature did not converge from {w_start} to {w_end} (err {err:.2e})")
            parts.append(val)
        return parts[0] + 1j * parts[1]

    def width(self, u):
        """Physical width of the cross-section at ``u`` in a straight region (sampled mid-strip)."""
        return float(np.abs(self.dF(complex(u, 0.5))))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class StraightMap(ConformalMap):
    """z = z0 + width * w."""

    width_: float
    z0: complex = 0j
    kind = "straight"
    base = 0j

    def derivatives(self, w):
        w = np.asarray(w, dtype=complex)
        one = np.ones_like(w)
        return self.width_ * one, 0 * one, 0 * one

    def point(self, w):
        return self.z0 + self.width_ * complex(w)

    def to_dict(self):
        return {"kind": self.kind, "width": self.width_, "z0": self.z0}


@dataclass(frozen=True)
class ExpSCMap(ConformalMap):
    """Schwarz-Christoffel map with rounded (approximate curve) factors.

    F = f o g with g(w) = exp(pi w) and

        f'(om) = A prod_k (sqrt((om + i b_k - w_k)^2 - c_k^2) - i b_k)^(alpha_k - 1) / om

    so that F'(w) = pi A prod_k(...) at om = exp(pi w).  ``w0`` is the
    base point in the om half plane, mapped to ``z0``.
    """

    A: complex
    alphas: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    prevertices: Tuple[float, ...]
    w0: float = 2.0
    z0: complex = 0j
    kind = "exp_sc"

    def __post_init__(self):
        n = len(self.alphas)
        if not (len(self.b) == len(self.c) == len(self.prevertices) == n):
            raise ValueError("alphas, b, c and prevertices must have equal length")
        if abs(sum(a - 1 for a in self.alphas)) > 1e-12:
            raise ValueError("sum(alpha_k - 1) must vanish for parallel asymptotic walls")
        if self.w0 <= 0:
            raise ValueError("base point must lie on the positive real axis")

    @property
    def base(self):
        return complex(np.log(self.w0) / np.pi)

    def derivatives(self, w):
        w = np.asarray(w, dtype=complex)
        om = np.exp(np.pi * w)
        log_p = np.zeros_like(om)
        G = np.zeros_like(om)
        Gp = np.zeros_like(om)
        for alpha, bk, ck, wk in zip(self.alphas, self.b, self.c, self.prevertices):
            zeta = om + 1j * bk - wk
            s = np.sqrt(zeta - ck) * np.sqrt(zeta + ck)
            h = s - 1j * bk
            e = alpha - 1.0
            log_p = log_p + e * _log_upper(h)
            G = G + e * zeta / (s * h)
            Gp = Gp + e * (1.0 / (s * h) - zeta**2 / (s**3 * h) - zeta**2 / (s**2 * h**2))
        d1 = np.pi * self.A * np.exp(log_p)
        H = np.pi * om * G
        dH = np.pi**2 * om * G + np.pi**2 * om**2 * Gp
        return d1, d1 * H, d1 * (H**2 + dH)

    def to_dict(self):
        return {
            "kind": self.kind, "A": self.A, "alphas": list(self.alphas), "b": list(self.b),
            "c": list(self.c), "prevertices": list(self.prevertices), "w0": self.w0, "z0": self.z0,
        }


@dataclass(frozen=True)
class OuterPolygonMap(ConformalMap):
    """Outer-polygon Schwarz-Christoffel map of a bend.

    F = f o g with g(w) = exp(pi w)^((phi2 - phi1)/pi) e^(i phi1) + a, which
    sends the strip onto the wedge of apex ``a`` between the rays at angles
    phi1 and phi2, and

        f'(om) = A (om - 1)^(alpha - 1) / ((om + 1)^(alpha - 1) (om - a)).

    ``w0`` is a strip point (not an om point) mapped to ``z0``.
    """

    A: complex
    alpha: float
    phi1: float
    phi2: float
    a: float
    w0: complex = 0j
    z0: complex = 0j
    kind = "outer_polygon"

    def __post_init__(self):
        if not 0 <= self.phi1 < self.phi2 <= np.pi:
            raise ValueError("need 0 <= phi1 < phi2 <= pi so the wedge stays in the upper half plane")
        if not -1 < self.a < 1:
            raise ValueError("wedge apex must lie between the prevertices -1 and 1")

    @property
    def base(self):
        return complex(self.w0)

    def derivatives(self, w):
        w = np.asarray(w, dtype=complex)
        sig = self.phi2 - self.phi1
        om = np.exp(sig * w + 1j * self.phi1) + self.a
        e = self.alpha - 1.0
        d1 = self.A * sig * np.exp(e * np.log((om - 1) / (om + 1)))
        q = om * om - 1.0
        H = 2 * e * sig * (om - self.a) / q
        dH_dom = 2 * e * sig * (q - 2 * om * (om - self.a)) / q**2
        return d1, d1 * H, d1 * (H**2 + sig * (om - self.a) * dH_dom)

    def to_dict(self):
        return {
            "kind": self.kind, "A": self.A, "alpha": self.alpha, "phi1": self.phi1,
            "phi2": self.phi2, "a": self.a, "w0": self.w0, "z0": self.z0,
        }


def map_from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    if kind == "straight":
        return StraightMap(float(d["width"]), complex(d.get("z0", 0)))
    if kind == "exp_sc":
        return ExpSCMap(
            A=complex(d["A"]), alphas=tuple(map(float, d["alphas"])), b=tuple(map(float, d["b"])),
            c=tuple(map(float, d["c"])), prevertices=tuple(map(float, d["prevertices"])),
            w0=float(d.get("w0", 2.0)), z0=complex(d.get("z0", 0)),
        )
    if kind == "outer_polygon":
        return OuterPolygonMap(
            A=complex(d["A"]), alpha=float(d["alpha"]), phi1=float(d["phi1"]), phi2=float(d["phi2"]),
            a=float(d["a"]), w0=complex(d.get("w0", 0)), z0=complex(d.get("z0", 0)),
        )
    raise ValueError(f"unknown map kind {kind!r}")


def map_point(cmap, w):
    w = complex(w)
    if not -1e-12 <= w.imag <= 1 + 1e-12:
        raise ValueError("strip points need 0 <= Im(w) <= 1")
    return cmap.point(w)


def map_derivatives(cmap, w):
    d1, d2, d3 = cmap.derivatives(complex(w))
    return complex(d1), complex(d2), complex(d3)


def metric_mu(cmap, u, v):
    """Area distortion |F'(u + iv)|^2."""
    w = np.asarray(u) + 1j * np.asarray(v)
    return np.abs(cmap.dF(w)) ** 2


def metric_mu_dv(cmap, u, v):
    """d mu / dv, using dF'/dv = i F''."""
    d1, d2, _ = cmap.derivatives(np.asarray(u) + 1j * np.asarray(v))
    return 2 * np.real(np.conj(d1) * 1j * d2)


# --- admittance profiles ---------------------------------------------------

def _ramp(s, shape):
    """Monotone 0 -> 1 transition on s in [0, 1] with its first two derivatives."""
    s = np.clip(s, 0.0, 1.0)
    if shape == "quintic":
        f = s**3 * (10 - 15 * s + 6 * s**2)
        f1 = 30 * s**2 * (1 - s) ** 2
        f2 = 60 * s * (1 - s) * (1 - 2 * s)
    elif shape == "raised_cosine":
        f = 0.5 * (1 - np.cos(np.pi * s))
        f1 = 0.5 * np.pi * np.sin(np.pi * s)
        f2 = 0.5 * np.pi**2 * np.cos(np.pi * s)
    elif shape == "septic":
        f = s**4 * (35 - 84 * s + 70 * s**2 - 20 * s**3)
        f1 = 140 * s**3 * (1 - s) ** 3
        f2 = 420 * s**2 * (1 - s) ** 2 * (1 - 2 * s)
    else:
        raise ValueError(f"unknown ramp shape {shape!r}")
    return f, f1, f2


RAMP_SHAPES = ("quintic", "septic", "raised_cosine")


@dataclass(frozen=True)
class AdmittanceSegment:
    u_start: float
    u_ramp_in: float
    u_ramp_out: float
    u_end: float
    beta: complex

    def __post_init__(self):
        if not self.u_start < self.u_ramp_in <= self.u_ramp_out < self.u_end:
            raise ValueError("need u_start < u_ramp_in <= u_ramp_out < u_end")
        if complex(self.beta).real < 0:
            raise ValueError("Re(beta) < 0 would make the wall active")


@dataclass(frozen=True)
class AdmittanceProfile:
    """Piecewise smooth admittance beta(u) along the wall v = 1 of the strip."""

    segments: Tuple[AdmittanceSegment, ...] = ()
    shape: str = "quintic"

    def __post_init__(self):
        if self.shape not in RAMP_SHAPES:
            raise ValueError(f"unknown ramp shape {self.shape!r}")
        segs = sorted(self.segments, key=lambda s: s.u_start)
        for s1, s2 in zip(segs, segs[1:]):
            if s2.u_start < s1.u_end:
                raise ValueError("admittance segments overlap")

    def evaluate(self, u):
        """Return (beta, beta', beta'') at ``u``; exactly zero off the segments."""
        u = np.asarray(u, dtype=float)
        b0 = np.zeros(u.shape, dtype=complex)
        b1 = np.zeros(u.shape, dtype=complex)
        b2 = np.zeros(u.shape, dtype=complex)
        for seg in self.segments:
            beta = complex(seg.beta)
            up = (u > seg.u_start) & (u < seg.u_ramp_in)
            flat = (u >= seg.u_ramp_in) & (u <= seg.u_ramp_out)
            down = (u > seg.u_ramp_out) & (u < seg.u_end)
            if np.any(up):
                L = seg.u_ramp_in - seg.u_start
                f, f1, f2 = _ramp((u[up] - seg.u_start) / L, self.shape)
                b0[up] += beta * f
                b1[up] += beta * f1 / L
                b2[up] += beta * f2 / L**2
            b0[flat] += beta
            if np.any(down):
                L = seg.u_end - seg.u_ramp_out
                f, f1, f2 = _ramp((seg.u_end - u[down]) / L, self.shape)
                b0[down] += beta * f
                b1[down] -= beta * f1 / L
                b2[down] += beta * f2 / L**2
        return b0, b1, b2

    @property
    def support(self):
        return [(s.u_start, s.u_end) for s in self.segments]

    def is_passive(self):
        return all(complex(s.beta).real >= 0 for s in self.segments)

    def to_dict(self):
        return {
            "shape": self.shape,
            "segments": [
                {"u_start": s.u_start, "u_ramp_in": s.u_ramp_in, "u_ramp_out": s.u_ramp_out,
                 "u_end": s.u_end, "beta": complex(s.beta)}
                for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, d):
        segs = tuple(
            AdmittanceSegment(float(s["u_start"]), float(s["u_ramp_in"]), float(s["u_ramp_out"]),
                              float(s["u_end"]), complex(s["beta"]))
            for s in d.get("segments", [])
        )
        return cls(segs, d.get("shape", "quintic"))


@dataclass(frozen=True)
class ConformalBlock:
    """One waveguide section: map, wall admittance and the tabulated u-range."""

    map: ConformalMap
    admittance: AdmittanceProfile = field(default_factory=AdmittanceProfile)
    u_range: Tuple[float, float] = (-5.0, 5.0)
    name: str = "block"

    def __post_init__(self):
        uL, uR = self.u_range
        if not uL < uR:
            raise ValueError("u_range must be increasing")
        for a, b in self.admittance.support:
            if a <= uL or b >= uR:
                raise ValueError(f"{self.name}: admittance must vanish at both block ends")

    @property
    def end_widths(self):
        return self.map.width(self.u_range[0]), self.map.width(self.u_range[1])

    def mu(self, u, v):
        return metric_mu(self.map, u, v)

    def straightness(self, end="left"):
        """Relative variation of |F'(u + i)| over the unit interval next to an end."""
        uL, uR = self.u_range
        us = np.linspace(uL, uL + 1, 41) if end == "left" else np.linspace(uR - 1, uR, 41)
        g = np.abs(self.map.dF(us + 1j))
        return float((g.max() - g.min()) / g.mean())

    def is_straight_at_ends(self, tol=STRAIGHTNESS_TOL):
        return self.straightness("left") < tol and self.straightness("right") < tol

    def grid_image(self, us: Sequence[float], vs: Sequence[float]):
        """Physical images of a (u, v) grid; rows are (u, v, x, y)."""
        rows = []
        for u in us:
            z_bottom = self.map.point(complex(u, 0.0))
            prev_v, prev_z = 0.0, z_bottom
            for v in sorted(vs):
                z = prev_z + self.map._segment(complex(u, prev_v), complex(u, v))
                rows.append((u, v, z.real, z.imag))
                prev_v, prev_z = v, z
        return np.array(rows)


def admittance_Y(block: ConformalBlock, u):
    """Transformed admittance Y = beta |F'(u + i)| and its first two u-derivatives."""
    u = np.asarray(u, dtype=float)
    b0, b1, b2 = block.admittance.evaluate(u)
    d1, d2, d3 = block.map.derivatives(u + 1j)
    g = np.abs(d1)
    r = d2 / d1
    g1 = g * np.real(r)
    g2 = g * (np.real(r) ** 2 + np.real(d3 / d1 - r**2))
    return b0 * g, b1 * g + b0 * g1, b2 * g + 2 * b1 * g1 + b0 * g2
