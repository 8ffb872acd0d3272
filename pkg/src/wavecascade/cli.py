"""Command line front end: ``wavecascade solve|field|validate``."""
import argparse
import csv
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .fd_oracle import GridTooCoarse, solve_chain
from .geometry import ConformalBlock
from .numcore import SolverError
from .pipeline import rt_dtn_comparison, solve_fields, solve_structure

log = logging.getLogger("wavecascade")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def _fmt(x):
    return f"{x:.17g}"


def _header_lines(cfg):
    return [f"# {k} = {_fmt(v)}" for k, v in sorted(cfg.notes.items())]


def _solve_one(cfg, k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_structure(cfg.elements, k, cfg.settings, cfg.phi_in())
    rep = sol.power()
    return rep.ratio, sol.S_total.R_plus @ sol.phi_in, sol.S_total.T_plus @ sol.phi_in


def _run(job):
    fn, cfg, k = job
    try:
        return k, fn(cfg, k), None
    except (SolverError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return k, None, f"{type(exc).__name__}: {exc}"


def _map_k(fn, cfg, ks, jobs):
    """Yield (k, result, error) for every k, in k order, as soon as each is available."""
    tasks = [(fn, cfg, k) for k in ks]
    if jobs <= 1 or len(tasks) == 1:
        yield from map(_run, tasks)
        return
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
        yield from ex.map(_run, tasks)


def cmd_solve(cfg, out: Path, jobs=1):
    """Sweep over k; writes sweep.csv with P and the reflected/transmitted amplitudes."""
    N = cfg.settings.N
    failed = 0
    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        for line in _header_lines(cfg):
            fh.write(line + "\n")
        w = csv.writer(fh, lineterminator="\n")
        head = ["k", "P"]
        for tag in ("R", "T"):
            head += [f"{p}{tag}{n}" for n in range(N) for p in ("re", "im")]
        w.writerow(head)
        for k, res, err in _map_k(_solve_one, cfg, cfg.k_list, jobs):
            if err is not None:
                log.error("k=%g failed: %s", k, err)
                failed += 1
                continue
            P, r, t = res
            row = [_fmt(k), _fmt(P)]
            for vec in (r, t):
                for z in vec:
                    row += [_fmt(z.real), _fmt(z.imag)]
            w.writerow(row)
            fh.flush()
            log.info("k=%g P=%.6f", k, P)
    return failed


def _gnuplot(csv_name, N, k):
    cols = ", \\\n     ".join(
        f"'{csv_name}' using 1:{4 + 2 * n} with lines title 'Re Phi_{n}'" for n in range(N))
    return (
        "set datafile separator ','\n"
        f"set title 'Modal coefficients, k = {k:g}'\n"
        "set xlabel 'distance along centre line'\n"
        "set ylabel 'Re Phi_n'\n"
        "set key outside\n"
        f"plot {cols}\n"
    )


def cmd_field(cfg, k, out: Path):
    """DtN field through the whole structure: field.csv and a gnuplot script."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_structure(cfg.elements, k, cfg.settings, cfg.phi_in())
        fs = solve_fields(sol)
    N = cfg.settings.N
    with open(out / "field.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "segment", "u"] + [f"{p}_phi{n}" for n in range(N) for p in ("re", "im")])
        for i, seg in enumerate(fs.segments):
            for s, u, phi in zip(seg.s, seg.u, seg.phi):
                row = [_fmt(s), str(i), _fmt(u)]
                for z in phi:
                    row += [_fmt(z.real), _fmt(z.imag)]
                w.writerow(row)
    (out / "field.gp").write_text(_gnuplot("field.csv", N, k))
    return fs


def _fd_end(cfg, k):
    cells = 40
    for _ in range(4):
        try:
            return solve_chain(cfg.elements, k, incident=cfg.phi_in(), cells_per_unit=cells, nv=41)
        except GridTooCoarse:
            cells *= 2
    raise GridTooCoarse(f"could not resolve k={k} with {cells // 2} cells per unit")


def _validate_one(cfg, k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_structure(cfg.elements, k, cfg.settings, cfg.phi_in())
        comp = rt_dtn_comparison(sol)
        fd = _fd_end(cfg, k)
    end = sol.end_field()
    fd_end = fd.transmitted
    m = min(len(end), len(fd_end))
    # relative magnitude difference; modes below 1e-8 are compared absolutely
    rel = np.abs(np.abs(end[:m]) - np.abs(fd_end[:m])) / np.maximum(np.abs(fd_end[:m]), 1e-8)
    return comp, end[:m], fd_end[:m], rel


def cmd_validate(cfg, out: Path, jobs=1):
    """RT vs DtN at every block end and Fourier vs FD at the end plane, per k.

    ``delta`` is |a - b| for the RT/DtN rows and the relative |Phi_n| difference for the FD rows.
    """
    names = [el.name for el in cfg.elements if isinstance(el, ConformalBlock)]
    failed = 0
    with open(out / "validate.csv", "w", newline="") as fh:
        for line in _header_lines(cfg):
            fh.write(line + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "check", "location", "n", "re_a", "im_a", "re_b", "im_b", "delta"])
        for k, res, err in _map_k(_validate_one, cfg, cfg.k_list, jobs):
            if err is not None:
                log.error("k=%g failed: %s", k, err)
                failed += 1
                continue
            comp, end, fd_end, rel = res
            for name, (a, b, d) in zip(names, comp):
                for n in range(len(a)):
                    w.writerow([_fmt(k), "rt_dtn", f"{name}_end", n, _fmt(a[n].real), _fmt(a[n].imag),
                                _fmt(b[n].real), _fmt(b[n].imag), _fmt(d[n])])
            for n in range(len(end)):
                w.writerow([_fmt(k), "fourier_fd", "end", n, _fmt(end[n].real), _fmt(end[n].imag),
                            _fmt(fd_end[n].real), _fmt(fd_end[n].imag), _fmt(rel[n])])
            log.info("k=%g max RT-DtN delta %.3e, |Phi_0| rel delta %.3e", k,
                     max(d.max() for _, _, d in comp), rel[0])
    return failed


def build_parser():
    p = argparse.ArgumentParser(prog="wavecascade", description="Waveguide scattering by modal Riccati/DtN solves.")
    p.add_argument("command", choices=("solve", "field", "validate"))
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML configuration file")
    src.add_argument("--preset", choices=sorted(cfgmod.PRESETS), help="built-in configuration")
    p.add_argument("--k", type=float, nargs="+", help="override the k grid")
    p.add_argument("--N", type=int, help="override the truncation order")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel k workers")
    p.add_argument("--out", help="output directory (default: config 'output')")
    return p


def _setup_logging():
    level = os.environ.get("WAVECASCADE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(args.config) if args.config else cfgmod.PRESETS[args.preset]()
        if args.k:
            if min(args.k) <= 0:
                raise cfgmod.ConfigError("--k: values must be positive")
            cfg.k_list = list(args.k)
        if args.N is not None:
            if args.N < 1:
                raise cfgmod.ConfigError("--N: must be >= 1")
            cfg.settings.N = args.N
    except (cfgmod.ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    cfgmod.dump(cfg, out / "config.yaml")
    try:
        if args.command == "solve":
            failed = cmd_solve(cfg, out, args.jobs)
        elif args.command == "field":
            cmd_field(cfg, cfg.k_list[0], out)
            failed = 0
        else:
            failed = cmd_validate(cfg, out, args.jobs)
    except SolverError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    return EXIT_SOLVER if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
