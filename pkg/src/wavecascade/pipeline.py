"""Whole-structure solves: blocks joined by straight connectors, fed from the left."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .analysis import PowerReport, power_ratio
from .assembly import CoefficientTable, build_table, default_blend
from .cascade import StraightGuide, axial_wavenumbers, chain, propagator_U
from .dtn_solver import (dtn_from_reflection, propagate_field, reflection_from_dtn, solve_lambda_R,
                         _mat)
from .geometry import ConformalBlock
from .numcore import mat_solve
from .rt_solver import ScatteringMatrix, solve_rt

log = logging.getLogger(__name__)

Element = Union[ConformalBlock, StraightGuide]


@dataclass
class SolverSettings:
    N: int = 10
    du: float = 0.01
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    blend_fraction: float = 0.2


@dataclass
class BlockResult:
    block: ConformalBlock
    table: CoefficientTable
    S: ScatteringMatrix


@dataclass
class StructureSolution:
    k: float
    elements: List[Element]
    blocks: List[BlockResult]
    S_total: ScatteringMatrix
    phi_in: np.ndarray
    settings: SolverSettings

    @property
    def N(self):
        return self.settings.N

    def power(self) -> PowerReport:
        return power_ratio(self.S_total, self.phi_in, self.k)

    def end_field(self):
        """Modal field leaving the right end (no sources on the right)."""
        return self.S_total.T_plus @ self.phi_in

    def interface_fields_rt(self):
        """Total modal field at the right end of every block, from the cascade."""
        out = []
        scat = self._scatterers()
        for j, el in enumerate(self.elements):
            if not isinstance(el, ConformalBlock):
                continue
            left = chain(scat[: j + 1], self.k)
            rest = scat[j + 1:]
            if not rest:
                out.append(left.T_plus @ self.phi_in)
                continue
            w = left.width_right
            right = chain([ScatteringMatrix.identity(self.N, width=w, k=self.k)] + rest, self.k)
            I = np.eye(self.N)
            phi_plus = mat_solve(I - left.R_minus @ right.R_plus, left.T_plus @ self.phi_in)
            out.append((I + right.R_plus) @ phi_plus)
        return out

    def _scatterers(self):
        it = iter(self.blocks)
        return [next(it).S if isinstance(el, ConformalBlock) else el for el in self.elements]


def _validate(elements: Sequence[Element]):
    if not elements or not isinstance(elements[0], ConformalBlock) or not isinstance(elements[-1], ConformalBlock):
        raise ValueError("a structure must start and end with a block")
    for a, b in zip(elements, elements[1:]):
        if isinstance(a, StraightGuide) and isinstance(b, StraightGuide):
            raise ValueError("two connectors in a row")


def block_scattering(block: ConformalBlock, k, settings: SolverSettings):
    table = build_table(block, k, settings.N, settings.du,
                        default_blend(block.u_range, settings.blend_fraction))
    S = solve_rt(table, rel_tol=settings.rel_tol, abs_tol=settings.abs_tol, widths=block.end_widths)
    return BlockResult(block, table, S)


def solve_structure(elements: Sequence[Element], k, settings: Optional[SolverSettings] = None, phi_in=None):
    """RT solve of every block and the building-block cascade of the whole structure."""
    settings = settings or SolverSettings()
    elements = list(elements)
    _validate(elements)
    N = settings.N
    blocks = [block_scattering(el, k, settings) for el in elements if isinstance(el, ConformalBlock)]
    it = iter(blocks)
    scat = [next(it).S if isinstance(el, ConformalBlock) else el for el in elements]
    S_total = chain(scat, k)
    if phi_in is None:
        phi_in = np.eye(N, dtype=complex)[:, 0]
    return StructureSolution(float(k), elements, blocks, S_total, np.asarray(phi_in, complex), settings)


# --- DtN field through the structure -----------------------------------------

@dataclass
class FieldSegment:
    kind: str  # "block" or "guide"
    u: np.ndarray  # local axial coordinate (strip u for blocks, physical length for guides)
    s: np.ndarray  # distance along the centre line from the structure's left end
    phi: np.ndarray  # (len(u), N) modal coefficients
    lam: Optional[np.ndarray] = None  # (len(u), N) transverse eigenvalues, blocks only
    element: object = None


@dataclass
class FieldSolution:
    k: float
    segments: List[FieldSegment] = field(default_factory=list)
    reflection: Optional[np.ndarray] = None  # reflection seen by the incident wave

    @property
    def interface_fields(self):
        """DtN total field at the right end of every block."""
        return [seg.phi[-1] for seg in self.segments if seg.kind == "block"]

    def axial(self):
        """Concatenated (s, Phi) along the whole structure."""
        s = np.concatenate([seg.s for seg in self.segments])
        phi = np.vstack([seg.phi for seg in self.segments])
        return s, phi


def _centre_arclength(block: ConformalBlock, us):
    g = np.abs(block.map.dF(np.asarray(us) + 0.5j))
    ds = 0.5 * (g[1:] + g[:-1]) * np.diff(us)
    return np.concatenate([[0.0], np.cumsum(ds)])


def solve_fields(sol: StructureSolution, guide_samples=41):
    """DtN solve through all blocks, closing each block on the right with the rest of the structure."""
    k, N, st = sol.k, sol.N, sol.settings
    elements = sol.elements
    tables = [b.table for b in sol.blocks]
    # right-to-left sweep: DtN operators and the reflection seen at each block's left end
    traj = [None] * len(tables)
    R_left = [None] * len(tables)
    R_after = None  # reflection seen by a wave leaving the current element to the right
    b = len(tables) - 1
    for el in reversed(elements):
        if isinstance(el, StraightGuide):
            U = propagator_U(el.width, k, el.length, N)
            R_after = U @ R_after @ U
            continue
        t = tables[b]
        lam_end = None if R_after is None else dtn_from_reflection(t.B_plus, R_after)
        traj[b] = solve_lambda_R(t, lam_end, st.rel_tol, st.abs_tol)
        R_left[b] = reflection_from_dtn(t.B_minus, _mat(traj[b].states[0], N))
        R_after = R_left[b]
        b -= 1

    # left-to-right sweep of the field
    out = FieldSolution(k, reflection=R_left[0])
    phi_plus = sol.phi_in
    s0 = 0.0
    b = 0
    I = np.eye(N)
    for idx, el in enumerate(elements):
        if isinstance(el, ConformalBlock):
            t = tables[b]
            phi0 = (I + R_left[b]) @ phi_plus
            phi = propagate_field(t, traj[b], phi0, st.rel_tol, st.abs_tol)
            s = s0 + _centre_arclength(el, t.u_grid)
            out.segments.append(FieldSegment("block", t.u_grid, s, phi, t.lam_tab, el))
            s0 = s[-1]
            phi_end = phi[-1]
            b += 1
            if b < len(tables):
                # decompose at the right end against what lies beyond
                nxt = elements[idx + 1]
                R_next = R_left[b]
                if isinstance(nxt, StraightGuide):
                    U = propagator_U(nxt.width, k, nxt.length, N)
                    R_here = U @ R_next @ U
                else:
                    R_here = R_next
                phi_plus = mat_solve(I + R_here, phi_end)
        else:
            R_next = R_left[b]
            x = np.linspace(0.0, el.length, guide_samples)
            alpha = axial_wavenumbers(el.width, k, N)
            far = np.exp(1j * alpha * el.length) * phi_plus  # right-going part at the far end
            back = R_next @ far
            phi = np.array([np.exp(1j * alpha * xi) * phi_plus + np.exp(1j * alpha * (el.length - xi)) * back
                            for xi in x])
            out.segments.append(FieldSegment("guide", x, s0 + x, phi, None, el))
            s0 += el.length
            phi_plus = far
    return out


def rt_dtn_comparison(sol: StructureSolution, fields: Optional[FieldSolution] = None):
    """Per-interface (RT field, DtN field, |difference|) triples, left to right."""
    fields = fields or solve_fields(sol)
    rt = sol.interface_fields_rt()
    dtn = fields.interface_fields
    return [(a, b, np.abs(a - b)) for a, b in zip(rt, dtn)]


def power_sweep(elements, ks, settings=None, phi_in=None):
    out = []
    for k in ks:
        sol = solve_structure(elements, k, settings, phi_in)
        out.append((k, sol.power(), sol))
    return out
