"""Command-line front end.

    unruhneg sweep --family psi-plus --bipartition full --qr 1,0.9 --out curves.csv
    unruhneg boundary --qr 0.7
    unruhneg extrema --family psi-one --qr 0.9 --r-stop 0.25 --r-step 0.01
    unruhneg plot curves.csv curves.svg
    unruhneg selftest

A config file (``--config path``) holds ``key = value`` lines using the long
flag names without dashes (``r-stop = 1.5``). Command-line flags win.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import math
import os
import sys
import time

import numpy as np

from .bogoliubov import oracle_pt
from .params import Bipartition, Family, UnruhWeights, make_squeezing
from .plotting import emit_plot
from .states import assemble_pt
from .sweeps import (
    DEFAULT_QR,
    SweepSpec,
    run_sweep,
    scan_cutoff_boundary,
    scan_extremum,
)

log = logging.getLogger("unruhneg")

SELFTEST_QR = (1.0, 0.9, 0.7, 0.5, 0.3)
SELFTEST_R = (0.0, 0.3, 0.8)
SELFTEST_NMAX = (4, 8)
SELFTEST_TOL = 1e-12


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _qr_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q_R list {text!r}") from None


def _add_physics(p, *, family=True, bipartition=True):
    if family:
        p.add_argument("--family", choices=[f.value for f in Family])
    if bipartition:
        p.add_argument("--bipartition", choices=[b.value for b in Bipartition])
    p.add_argument("--qr", type=_qr_list, help="comma-separated q_R values in (0, 1]")
    p.add_argument("--tol", type=float, help="convergence tolerance on N (default 1e-6)")
    p.add_argument("--nmax-start", type=int)
    p.add_argument("--nmax-cap", type=int)


def _add_grid(p):
    p.add_argument("--r-start", type=float)
    p.add_argument("--r-stop", type=float)
    p.add_argument("--r-step", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unruhneg", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="key = value file with defaults for the flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="negativity on a (q_R, r) grid, CSV plus SVG")
    _add_physics(p)
    _add_grid(p)
    p.add_argument("--out", help="CSV path; the figure goes next to it as .svg")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("boundary", help="bisect the r where particle-only entanglement dies")
    p.add_argument("--family", choices=[Family.PSI_PLUS.value, Family.PSI_MINUS.value])
    p.add_argument("--qr", type=_qr_list)
    p.add_argument("--r-lo", type=float)
    p.add_argument("--r-hi", type=float)
    p.add_argument("--tol-r", type=float)

    p = sub.add_parser("extrema", help="interior local maxima of N(r)")
    _add_physics(p)
    _add_grid(p)

    p = sub.add_parser("plot", help="render a sweep CSV to SVG")
    p.add_argument("csv")
    p.add_argument("svg", nargs="?")

    sub.add_parser("selftest", help="direct assembly against the state-vector oracle")
    return parser


DEFAULTS = {
    "family": Family.PSI_PLUS.value,
    "bipartition": Bipartition.FULL.value,
    "qr": DEFAULT_QR,
    "tol": 1e-6,
    "nmax_start": 8,
    "nmax_cap": 512,
    "r_start": 0.0,
    "r_stop": 2.0,
    "r_step": 0.05,
    "out": "sweep.csv",
    "jobs": 1,
    "r_lo": None,
    "r_hi": None,
    "tol_r": 1e-4,
}
_CONVERT = {
    "qr": _qr_list, "tol": float, "nmax_start": int, "nmax_cap": int, "r_start": float,
    "r_stop": float, "r_step": float, "jobs": int, "r_lo": float, "r_hi": float, "tol_r": float,
}


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from DEFAULTS."""
    config = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in config:
            value = config[key]
            setattr(args, key, _CONVERT.get(key, str)(value))
        else:
            setattr(args, key, default)
    return args


def _spec(args, out="") -> SweepSpec:
    return SweepSpec(
        family=args.family, bipartition=args.bipartition, q_r_list=args.qr,
        r_start=args.r_start, r_stop=args.r_stop, r_step=args.r_step, tol=args.tol,
        n_max_start=args.nmax_start, n_max_cap=args.nmax_cap, output_path=out,
    )


def cmd_sweep(args) -> int:
    spec = _spec(args, args.out)
    rows = run_sweep(spec, jobs=args.jobs)
    print(f"wrote {len(rows)} rows to {args.out}")
    if not args.no_plot:
        svg = os.path.splitext(args.out)[0] + ".svg"
        emit_plot(args.out, svg)
        print(f"wrote {svg}")
    return 0 if all(r.converged for r in rows) else 3


def cmd_boundary(args) -> int:
    status = 0
    for q in args.qr:
        exact = math.atanh(q) if q < 1 else math.inf
        r_lo = args.r_lo if args.r_lo is not None else max(0.0, exact - 0.3)
        r_hi = args.r_hi if args.r_hi is not None else exact + 0.3
        try:
            r_star = scan_cutoff_boundary(q, r_lo, r_hi, args.tol_r, family=args.family)
        except ValueError as exc:
            print(f"q_R={q:g}: {exc}")
            status = 2
            continue
        print(f"q_R={q:g}: r*={r_star:.6f}  arctanh(q_R)={exact:.6f}  diff={r_star - exact:+.2e}")
    return status


def cmd_extrema(args) -> int:
    grid = _spec(args).r_grid()
    for q in args.qr:
        peaks = scan_extremum(args.family, args.bipartition, q, grid, tol=args.tol,
                              n_max_start=args.nmax_start, n_max_cap=args.nmax_cap)
        if not peaks:
            print(f"q_R={q:g}: no interior maxima")
        for p in peaks:
            print(f"q_R={q:g}: maximum near r={p.r:.5f}, N={p.negativity:.8g}")
    return 0


def cmd_plot(args) -> int:
    svg = args.svg or os.path.splitext(args.csv)[0] + ".svg"
    emit_plot(args.csv, svg)
    print(f"wrote {svg}")
    return 0


def selftest(out=None) -> bool:
    """Compare every assembler with the oracle; one line per family/bipartition."""
    out = out or sys.stdout
    ok_all = True
    t0 = time.perf_counter()
    for fam, bip in itertools.product(Family, Bipartition):
        worst = 0.0
        for q, r, n in itertools.product(SELFTEST_QR, SELFTEST_R, SELFTEST_NMAX):
            w, p = UnruhWeights.from_qr(q), make_squeezing(r)
            direct = assemble_pt(fam, bip, w, p, n).to_dense()
            worst = max(worst, float(np.abs(direct - oracle_pt(fam, bip, w, p, n)).max()))
        ok = worst <= SELFTEST_TOL
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {fam.value:9s} {bip.value:12s} max|diff|={worst:.2e}",
              file=out)
    print(f"selftest finished in {time.perf_counter() - t0:.1f} s", file=out)
    return ok_all


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = resolve(args)
        if args.command == "selftest":
            return 0 if selftest() else 1
        handler = {"sweep": cmd_sweep, "boundary": cmd_boundary, "extrema": cmd_extrema,
                   "plot": cmd_plot}[args.command]
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"unruhneg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
