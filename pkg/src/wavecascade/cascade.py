"""Building-block composition of scattering matrices through straight connectors."""
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from .numcore import mat_solve
from .rt_solver import ScatteringMatrix

WIDTH_TOL = 1e-3


@dataclass(frozen=True)
class StraightGuide:
    width: float
    length: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("guide width must be positive")
        if self.length < 0:
            raise ValueError("guide length must be non-negative")


def axial_wavenumbers(a, k, N):
    """alpha_n = sqrt(k^2 - (n pi / a)^2), on the positive imaginary axis when cut off."""
    q = k * k - (np.arange(N) * np.pi / a) ** 2
    return np.where(q >= 0, np.sqrt(np.abs(q)), 1j * np.sqrt(np.abs(q))).astype(complex)


def propagator_U(a, k, length, N):
    """Diagonal straight-guide propagator exp(i alpha_n length)."""
    if a <= 0 or length < 0:
        raise ValueError("need a > 0 and length >= 0")
    if length == 0:
        return np.eye(N, dtype=complex)
    return np.diag(np.exp(1j * axial_wavenumbers(a, k, N) * length))


@dataclass
class CascadeResult:
    S_total: ScatteringMatrix
    C_plus: np.ndarray
    C_minus: np.ndarray
    guide: StraightGuide


def _check_widths(w1, g, w3):
    for w in (w1, w3):
        if w is not None and abs(w - g.width) > WIDTH_TOL * g.width:
            raise ValueError(f"block width {w:.6g} does not match connector width {g.width:.6g}")


def _plus(S1, U, S3):
    N = S1.N
    I = np.eye(N, dtype=complex)
    C_plus = mat_solve(I - S1.R_minus @ U @ S3.R_plus @ U, S1.T_plus)
    C_minus = U @ S3.R_plus @ U @ C_plus
    return C_plus, C_minus, S3.T_plus @ U @ C_plus, S1.R_plus + S1.T_minus @ C_minus


def combine(S1: ScatteringMatrix, guide: StraightGuide, S3: ScatteringMatrix, k=None) -> CascadeResult:
    """S1, then a straight connector, then S3."""
    if S1.N != S3.N:
        raise ValueError("scattering matrices have different sizes")
    _check_widths(S1.width_right, guide, S3.width_left)
    k = k if k is not None else (S1.k if S1.k is not None else S3.k)
    if guide.length > 0 and k is None:
        raise ValueError("a non-zero connector needs the wavenumber")
    U = propagator_U(guide.width, k, guide.length, S1.N) if guide.length > 0 else np.eye(S1.N, dtype=complex)
    Cp, Cm, Tp, Rp = _plus(S1, U, S3)
    _, _, Tm, Rm = _plus(S3.mirrored(), U, S1.mirrored())
    S = ScatteringMatrix(Rp, Rm, Tp, Tm, S1.u1, S3.u2, S1.width_left, S3.width_right, k)
    return CascadeResult(S, Cp, Cm, guide)


def connector_field(C_plus, C_minus, guide: StraightGuide, k, u, phi_in):
    """Modal field at distance ``u`` into the connector."""
    if not -1e-12 <= u <= guide.length + 1e-12:
        raise ValueError("u must lie within the connector")
    N = C_plus.shape[0]
    alpha = axial_wavenumbers(guide.width, k, N)
    up = np.exp(1j * alpha * u)
    # exp(-i alpha u) overflows for deep evanescent modes far from the interface; C_minus
    # carries the matching exp(i alpha l) factors so the product stays bounded
    return up * (C_plus @ phi_in) + (C_minus @ phi_in) / up


Element = Union[ScatteringMatrix, StraightGuide]


def chain(elements: Sequence[Element], k=None) -> ScatteringMatrix:
    """Fold a list of blocks and connectors; consecutive blocks get a zero-length joint."""
    blocks: List[ScatteringMatrix] = []
    guides: List[StraightGuide] = []
    pending = None
    for el in elements:
        if isinstance(el, StraightGuide):
            if pending is not None:
                raise ValueError("two connectors in a row")
            pending = el
        else:
            if blocks:
                w = el.width_left or blocks[-1].width_right or 1.0
                guides.append(pending if pending is not None else StraightGuide(w, 0.0))
            elif pending is not None:
                raise ValueError("chain must start with a block")
            blocks.append(el)
            pending = None
    if pending is not None:
        raise ValueError("chain must end with a block")
    if not blocks:
        raise ValueError("empty chain")
    S = blocks[0]
    for g, B in zip(guides, blocks[1:]):
        S = combine(S, g, B, k).S_total
    return S
