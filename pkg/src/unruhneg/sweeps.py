"""Parameter sweeps, cutoff-boundary bisection and extremum scans."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field

import numpy as np

from .negativity import DEFAULT_EPS_EIG, NegativityResult, converged_negativity
from .params import Bipartition, Family, UnruhWeights, as_bipartition, as_family, make_squeezing
from .states import assemble_pt, cutoff_predicate

log = logging.getLogger(__name__)

#: q_R values of the published curves, top to bottom.
DEFAULT_QR = (1.0, 0.9, 0.7, 0.6, 0.5, 0.3, 0.1)
R_WARN = 2.0
CSV_HEADER = ("family", "bipartition", "q_r", "r", "omega", "negativity",
              "n_max_used", "converged", "last_delta")


class MalformedCSVError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    family: Family = Family.PSI_PLUS
    bipartition: Bipartition = Bipartition.FULL
    q_r_list: tuple = DEFAULT_QR
    r_start: float = 0.0
    r_stop: float = 2.0
    r_step: float = 0.05
    tol: float = 1e-6
    n_max_start: int = 8
    n_max_cap: int = 512
    eps_eig: float = DEFAULT_EPS_EIG
    output_path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "family", as_family(self.family))
        object.__setattr__(self, "bipartition", as_bipartition(self.bipartition))
        object.__setattr__(self, "q_r_list", tuple(float(q) for q in self.q_r_list))
        if not self.r_step > 0:
            raise ValueError("r_step must be > 0")
        if self.r_start < 0 or self.r_stop < self.r_start:
            raise ValueError("need 0 <= r_start <= r_stop")
        if not self.q_r_list or any(not 0 < q <= 1 for q in self.q_r_list):
            raise ValueError("q_r values must lie in (0, 1]")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")

    def r_grid(self) -> list[float]:
        count = int(math.floor((self.r_stop - self.r_start) / self.r_step + 1e-9)) + 1
        # round away accumulated float error so grids are reproducible text
        return [round(self.r_start + i * self.r_step, 12) for i in range(count)]


@dataclass(frozen=True)
class SweepRow:
    family: str
    bipartition: str
    q_r: float
    r: float
    omega: float
    negativity: float
    n_max_used: int
    converged: bool
    last_delta: float


def omega_of(r: float) -> float:
    """Dimensionless frequency with ``tanh r = exp(-pi omega)``."""
    T = math.tanh(r)
    return math.inf if T == 0.0 else -math.log(T) / math.pi


def negativity_at(family, bipartition, q_r, r, *, tol=1e-6, n_max_start=8, n_max_cap=512,
                  eps_eig=DEFAULT_EPS_EIG) -> NegativityResult:
    weights = UnruhWeights.from_qr(q_r)
    params = make_squeezing(r)
    family, bipartition = as_family(family), as_bipartition(bipartition)
    if r > R_WARN:
        log.warning("r=%.3g: tanh r=%.4f, convergence needs n_max in the hundreds", r, params.T)
    return converged_negativity(
        lambda n: assemble_pt(family, bipartition, weights, params, n),
        tol=tol, n_max_start=n_max_start, n_max_cap=n_max_cap, eps_eig=eps_eig,
    )


def _row(args) -> SweepRow:
    spec, q, r = args
    res = negativity_at(spec.family, spec.bipartition, q, r, tol=spec.tol,
                        n_max_start=spec.n_max_start, n_max_cap=spec.n_max_cap,
                        eps_eig=spec.eps_eig)
    return SweepRow(spec.family.value, spec.bipartition.value, q, r, omega_of(r),
                    res.value, res.n_max_used, res.converged, res.last_delta)


def sweep_rows(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """One row per ``(q_r, r)``, ``q_r`` outer, in grid order."""
    tasks = [(spec, q, r) for q in spec.q_r_list for r in spec.r_grid()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, tasks))
    else:
        rows = [_row(t) for t in tasks]
    bad = sum(not row.converged for row in rows)
    if bad:
        log.warning("%d of %d sweep points did not converge (flagged in output)", bad, len(rows))
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Evaluate the sweep and write it to ``spec.output_path`` as CSV."""
    if not spec.output_path:
        raise ValueError("spec.output_path is empty")
    directory = os.path.dirname(os.path.abspath(spec.output_path))
    if not os.access(directory, os.W_OK):
        raise OSError(f"cannot write to {spec.output_path}")
    rows = sweep_rows(spec, jobs)
    with open(spec.output_path, "w", newline="") as fh:
        fh.write(format_rows(rows))
    return rows


# ---------------------------------------------------------------------------
# CSV


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def format_rows(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def parse_rows(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCSVError("empty CSV") from None
    if tuple(header) != CSV_HEADER:
        raise MalformedCSVError(f"unexpected header {header}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(CSV_HEADER):
            raise MalformedCSVError(f"line {lineno}: expected {len(CSV_HEADER)} fields")
        try:
            fam, bip, q, r, om, neg, nmax, conv, delta = rec
            if conv not in ("true", "false"):
                raise ValueError(f"bad converged flag {conv!r}")
            rows.append(SweepRow(fam, bip, float(q), float(r), float(om), float(neg),
                                 int(nmax), conv == "true", float(delta)))
        except ValueError as exc:
            raise MalformedCSVError(f"line {lineno}: {exc}") from exc
    if not rows:
        raise MalformedCSVError("CSV has a header but no data rows")
    return rows


def read_rows(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        return parse_rows(fh.read())


# ---------------------------------------------------------------------------
# scans


def scan_cutoff_boundary(q_r: float, r_lo: float, r_hi: float, tol_r: float = 1e-4, *,
                         family=Family.PSI_PLUS, noise_floor: float = DEFAULT_EPS_EIG,
                         neg_tol: float = 1e-13, n_max_cap: int = 4096) -> float:
    """Bisect for the ``r`` where the particle-only negativity of Psi+ vanishes.

    The bracket must satisfy the analytic predicate at ``r_lo`` and violate
    it at ``r_hi``. Each evaluation converges the negativity to ``neg_tol``.
    For Psi- the antiparticle bipartition is used.
    """
    weights = UnruhWeights.from_qr(q_r)
    if not r_lo < r_hi:
        raise ValueError("need r_lo < r_hi")
    if not cutoff_predicate(weights, make_squeezing(r_lo)):
        raise ValueError(f"bracket invalid: no entanglement predicted at r_lo={r_lo}")
    if cutoff_predicate(weights, make_squeezing(r_hi)):
        raise ValueError(f"bracket invalid: entanglement predicted at r_hi={r_hi}")
    family = as_family(family)
    bip = Bipartition.ANTIPARTICLE if family is Family.PSI_MINUS else Bipartition.PARTICLE

    def entangled(r):
        res = negativity_at(family, bip, q_r, r, tol=neg_tol, n_max_cap=n_max_cap)
        return res.value > noise_floor

    lo, hi = r_lo, r_hi
    while hi - lo > tol_r:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Extremum:
    r: float
    negativity: float
    grid_index: int
    values: tuple = field(default=(), repr=False)


def local_maxima(r_grid, values) -> list[Extremum]:
    """Interior strict local maxima, refined by a three-point parabola."""
    r = np.asarray(r_grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(r) < 3:
        raise ValueError("need at least 3 grid points")
    out = []
    for i in range(1, len(r) - 1):
        if v[i] > v[i - 1] and v[i] > v[i + 1]:
            coef = np.polyfit(r[i - 1:i + 2], v[i - 1:i + 2], 2)
            if coef[0] < 0:
                r_peak = -coef[1] / (2 * coef[0])
                out.append(Extremum(float(r_peak), float(np.polyval(coef, r_peak)), i))
            else:
                out.append(Extremum(float(r[i]), float(v[i]), i))
    return out


def scan_extremum(family, bipartition, q_r, r_grid, **kwargs) -> list[Extremum]:
    """Negativity on ``r_grid`` and its interior local maxima ``(r, N)``."""
    r_grid = list(r_grid)
    if len(r_grid) < 3:
        raise ValueError("need at least 3 grid points")
    values = [negativity_at(family, bipartition, q_r, r, **kwargs).value for r in r_grid]
    return [Extremum(e.r, e.negativity, e.grid_index, tuple(values))
            for e in local_maxima(r_grid, values)]
