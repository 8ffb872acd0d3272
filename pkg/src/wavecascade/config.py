"""YAML solver configuration: structure, solver settings and the k grid."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import yaml

from .cascade import StraightGuide
from .geometry import AdmittanceProfile, ConformalBlock, map_from_dict
from .pipeline import SolverSettings
from .presets import BETA_EXAMPLE, connector_length, example_blocks


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field (and line when known)."""


@dataclass
class SolveConfig:
    elements: list
    k_list: List[float]
    settings: SolverSettings = field(default_factory=SolverSettings)
    incident: Optional[List[complex]] = None
    output: str = "out"
    notes: dict = field(default_factory=dict)  # derived quantities, e.g. auto connector lengths

    def phi_in(self):
        v = np.zeros(self.settings.N, dtype=complex)
        if self.incident is None:
            v[0] = 1.0
        else:
            m = min(len(self.incident), self.settings.N)
            v[:m] = self.incident[:m]
        return v


def _cplx(z):
    z = complex(z)
    return str(z) if z.imag else z.real


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return _cplx(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _get(d, key, path, conv=None, default=...):
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping")
    if key not in d:
        if default is ...:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    if conv is None:
        return d[key]
    try:
        return conv(d[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}: {exc}") from None


def _parse_k(d):
    ks = d.get("k")
    if ks is None:
        raise ConfigError("k: missing")
    if isinstance(ks, (int, float)):
        out = [float(ks)]
    elif isinstance(ks, list):
        out = [float(x) for x in ks]
    elif isinstance(ks, dict):
        start, stop, step = (_get(ks, n, "k", float) for n in ("start", "stop", "step"))
        if step <= 0:
            raise ConfigError("k.step: must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        out = [start + i * step for i in range(n)]
    else:
        raise ConfigError("k: expected a number, a list or {start, stop, step}")
    if not out or min(out) <= 0:
        raise ConfigError("k: values must be positive")
    return out


def _parse_structure(items):
    if not isinstance(items, list) or not items:
        raise ConfigError("structure: expected a non-empty list")
    raw = []
    for i, it in enumerate(items):
        path = f"structure[{i}]"
        if not isinstance(it, dict) or len(it) != 1:
            raise ConfigError(f"{path}: expected exactly one of 'block' or 'guide'")
        (kind, body), = it.items()
        if kind == "block":
            try:
                cmap = map_from_dict(_get(body, "map", path))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{path}.map: {exc}") from None
            try:
                prof = AdmittanceProfile.from_dict(body.get("admittance", {}) or {})
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{path}.admittance: {exc}") from None
            u = _get(body, "u_range", path, lambda x: tuple(float(y) for y in x))
            if len(u) != 2 or u[1] <= u[0]:
                raise ConfigError(f"{path}.u_range: need [u_left, u_right] with u_left < u_right")
            raw.append(ConformalBlock(cmap, prof, u, str(body.get("name", f"block{i}"))))
        elif kind == "guide":
            raw.append(("guide", i, body or {}))
        else:
            raise ConfigError(f"{path}: unknown element {kind!r}")
    return raw


def _resolve_guides(raw, notes):
    out = []
    for j, el in enumerate(raw):
        if not (isinstance(el, tuple) and el[0] == "guide"):
            out.append(el)
            continue
        _, i, body = el
        path = f"structure[{i}]"
        left = raw[j - 1] if j > 0 else None
        right = raw[j + 1] if j + 1 < len(raw) else None
        if not isinstance(left, ConformalBlock) or not isinstance(right, ConformalBlock):
            raise ConfigError(f"{path}: a guide must sit between two blocks")
        w = body.get("width", "auto")
        width = left.end_widths[1] if w == "auto" else _get(body, "width", path, float)
        ln = body.get("length", "auto")
        length = connector_length(left, right) if ln == "auto" else _get(body, "length", path, float)
        if ln == "auto" or w == "auto":
            notes[f"{path}.length"] = length
            notes[f"{path}.width"] = width
        try:
            out.append(StraightGuide(width, length))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return out


def _check_widths(elements, tol=1e-3):
    for i, (a, b) in enumerate(zip(elements, elements[1:])):
        wa = a.end_widths[1] if isinstance(a, ConformalBlock) else a.width
        wb = b.end_widths[0] if isinstance(b, ConformalBlock) else b.width
        if abs(wa - wb) > tol * max(wa, wb):
            raise ConfigError(f"structure[{i}]/structure[{i + 1}]: widths {wa:.6g} and {wb:.6g} do not match")


def config_from_dict(d) -> SolveConfig:
    if not isinstance(d, dict):
        raise ConfigError("top level: expected a mapping")
    raw = _parse_structure(d.get("structure"))
    notes = {}
    elements = _resolve_guides(raw, notes)
    if not isinstance(elements[0], ConformalBlock) or not isinstance(elements[-1], ConformalBlock):
        raise ConfigError("structure: must start and end with a block")
    _check_widths(elements)
    s = d.get("solver", {}) or {}
    settings = SolverSettings(
        N=_get(s, "N", "solver", int, 10), du=_get(s, "du", "solver", float, 0.01),
        rel_tol=_get(s, "rel_tol", "solver", float, 1e-8), abs_tol=_get(s, "abs_tol", "solver", float, 1e-10),
        blend_fraction=_get(s, "blend_fraction", "solver", float, 0.2),
    )
    if settings.N < 1:
        raise ConfigError("solver.N: must be >= 1")
    if not 0 < settings.blend_fraction <= 1:
        raise ConfigError("solver.blend_fraction: must lie in (0, 1]")
    inc = d.get("incident")
    if inc is not None:
        try:
            inc = [complex(x) for x in inc]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"incident: {exc}") from None
    return SolveConfig(elements, _parse_k(d), settings, inc, str(d.get("output", "out")), notes)


def config_to_dict(cfg: SolveConfig):
    items = []
    for el in cfg.elements:
        if isinstance(el, ConformalBlock):
            items.append({"block": {"name": el.name, "u_range": list(el.u_range), "map": el.map.to_dict(),
                                    "admittance": el.admittance.to_dict()}})
        else:
            items.append({"guide": {"width": el.width, "length": el.length}})
    st = cfg.settings
    d = {
        "structure": items,
        "solver": {"N": st.N, "du": st.du, "rel_tol": st.rel_tol, "abs_tol": st.abs_tol,
                   "blend_fraction": st.blend_fraction},
        "k": list(cfg.k_list),
        "output": cfg.output,
    }
    if cfg.incident is not None:
        d["incident"] = list(cfg.incident)
    return _plain(d)


def loads(text) -> SolveConfig:
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError(f"{where}{exc}") from None
    return config_from_dict(d)


def load(path) -> SolveConfig:
    with open(path) as fh:
        return loads(fh.read())


def dumps(cfg: SolveConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def dump(cfg: SolveConfig, path):
    with open(path, "w") as fh:
        fh.write(dumps(cfg))


def example_config(beta=BETA_EXAMPLE, k_list: Sequence[float] = (15.0,), N=10) -> SolveConfig:
    """Step, derived-length connector and bend with the plateau admittance in both blocks."""
    step, bend = example_blocks(beta)
    ell = connector_length(step, bend)
    cfg = SolveConfig([step, StraightGuide(step.end_widths[1], ell), bend], [float(k) for k in k_list],
                      SolverSettings(N=N))
    cfg.notes["structure[1].length"] = ell
    return cfg


PRESETS = {"paper-example": example_config}  # preset name is part of the CLI
