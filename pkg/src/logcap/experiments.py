"""Convergence experiments for arc families and Cantor-type complements.

Both drivers produce one :class:`ConvergenceRow` per index ``n`` and can be
written out as CSV plus a JSON summary.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .green import green_eval, loglog_condition, rate_term
from .potential import CapacityResult, closed_form_capacity, equilibrium_measure
from .sets import (
    ArcFamily,
    CantorStage,
    FullCircle,
    MaterializeError,
    Segment,
    arc_alpha_lower,
    cantor_alpha,
    cantor_hausdorff_bound,
    cantor_intervals,
    hausdorff_distance,
    materialize,
)

__all__ = [
    "ConvergenceRow",
    "ExpDecay",
    "Reciprocal",
    "Custom",
    "CantorReport",
    "arc_convergence",
    "cantor_convergence",
    "cantor_condition",
    "green_sup_deviation",
    "green_circle",
    "green_segment",
    "rows_to_csv",
    "config_hash",
    "CSV_COLUMNS",
    "arc_summary",
    "cantor_grid",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "d_h", "alpha", "rate", "loglog_ok", "cap_numeric", "cap_closed", "green_sup_dev")
INTERVAL_CAPACITY = 0.25


@dataclass
class ConvergenceRow:
    n: int
    d_h: float
    alpha: float
    rate: float
    loglog_ok: bool
    cap_numeric: float | None = None
    cap_closed: float | None = None
    green_sup_dev: float | None = None
    d_h_numeric: float | None = None
    d_h_bound: float | None = None
    condition_ok: bool | None = None
    note: str = ""

    @property
    def cap_error(self) -> float | None:
        if self.cap_numeric is None or self.cap_closed is None:
            return None
        return abs(self.cap_numeric - self.cap_closed) / self.cap_closed

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExpDecay:
    """``L_n = exp(-n)``."""

    kind = "exp"

    def __call__(self, n: int) -> float:
        return math.exp(-n)


@dataclass(frozen=True)
class Reciprocal:
    """``L_n = 1/n``."""

    kind = "reciprocal"

    def __call__(self, n: int) -> float:
        return 1.0 / n


@dataclass(frozen=True)
class Custom:
    """Explicit ``L_1, L_2, ...``."""

    values: tuple
    kind = "custom"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        for k, v in enumerate(vals, start=1):
            if not 0.0 < v < math.pi:
                raise ValueError(f"L_{k} = {v!r} is not in (0, pi)")
        object.__setattr__(self, "values", vals)

    def __call__(self, n: int) -> float:
        if n > len(self.values):
            raise ValueError(f"only {len(self.values)} custom values supplied, asked for n = {n}")
        return self.values[n - 1]


def green_circle(z, radius: float = 1.0):
    """``log+(|z|/radius)``."""
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.abs(np.asarray(z, dtype=complex)) / radius), 0.0)


def green_segment(z, a: complex = 0.0, b: complex = 1.0):
    """Green's function of the segment ``[a, b]`` with pole at infinity."""
    w = (2.0 * np.asarray(z, dtype=complex) - (a + b)) / (b - a)
    return np.log(np.abs(w + np.sqrt(w - 1.0) * np.sqrt(w + 1.0)))


def green_sup_deviation(res_n: CapacityResult, limit, grid, *, tol: float = 1e-12) -> float:
    """``max over grid of g_n(z) - g_limit(z)``.

    ``limit`` is another :class:`CapacityResult` or a callable returning
    ``g_limit`` on an array.  Grid points sitting on a support point are
    skipped (and logged).
    """
    z = np.asarray(grid, dtype=complex).ravel()
    supports = [res_n.measure.support]
    if isinstance(limit, CapacityResult):
        supports.append(limit.measure.support)
    keep = np.ones(z.size, dtype=bool)
    for s in supports:
        for i0 in range(0, z.size, 4096):
            keep[i0 : i0 + 4096] &= np.abs(z[i0 : i0 + 4096, None] - s[None, :]).min(axis=1) > tol
    if not keep.all():
        log.warning("green_sup_deviation: skipped %d grid points on the support", int((~keep).sum()))
    z = z[keep]
    if z.size == 0:
        raise ValueError("no usable grid points")
    g_n = green_eval(res_n, z)
    g_lim = green_eval(limit, z) if isinstance(limit, CapacityResult) else np.asarray(limit(z), dtype=float)
    return float(np.max(g_n - g_lim))


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _circle_grid(n_per_circle=64):
    t = 2 * np.pi * (np.arange(n_per_circle) + 0.5) / n_per_circle
    return np.concatenate([1.1 * np.exp(1j * t), 2.0 * np.exp(1j * t)])


def arc_convergence(
    ls,
    n_max: int,
    resolution: float = 0.01,
    *,
    numeric_max_n: int = 16,
    min_points: int = 32,
    workers: int | None = None,
) -> list[ConvergenceRow]:
    """Rows for ``ArcFamily(n, L_n)`` converging to the unit circle.

    ``d_h`` is the exact gap half-chord ``2 sin((pi - L_n)/(2n))``; the sampled
    distance is kept in ``d_h_numeric``.  Capacities are solved numerically
    only for ``n <= numeric_max_n``; beyond that only the closed form is given.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    circle = materialize(FullCircle(1.0), resolution)

    def row(n):
        L = ls(n)
        spec = ArcFamily(n, L)
        d_h = 2.0 * math.sin((math.pi - L) / (2 * n))
        alpha = arc_alpha_lower(n, L)
        r = ConvergenceRow(
            n=n,
            d_h=d_h,
            alpha=alpha,
            rate=rate_term(d_h, alpha),
            loglog_ok=bool(loglog_condition(d_h, alpha)),
            cap_closed=closed_form_capacity(spec),
        )
        if n > numeric_max_n:
            return r
        try:
            A = materialize(spec, resolution, min_points=min_points)
        except MaterializeError as exc:
            r.note = f"capacity omitted: {exc}"
            return r
        res = equilibrium_measure(A)
        r.cap_numeric = res.capacity
        r.d_h_numeric = hausdorff_distance(A, circle)
        gaps = np.exp(1j * np.pi * (2 * np.arange(n) + 1) / n)
        r.green_sup_dev = green_sup_deviation(res, green_circle, np.concatenate([gaps, _circle_grid()]))
        if not res.converged:
            r.note = "solver did not converge"
        return r

    return _map(row, range(1, n_max + 1), workers)


def cantor_condition(eps_n: float, n: int, C: float) -> bool | None:
    """``log(1/eps_n) <= C n / log n``; undefined (``None``) for ``n < 2``."""
    if n < 2:
        return None
    return math.log(1.0 / eps_n) <= C * n / math.log(n)


@dataclass
class CantorReport:
    rows: list
    verdict: str
    tolerance: float
    max_depth: int
    note: str = ""
    config: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerances": {"capacity": self.tolerance, "monotone": 1e-9},
            "max_depth": self.max_depth,
            "limit_capacity": INTERVAL_CAPACITY,
            "note": self.note,
            "config_hash": config_hash(self.config),
        }


def cantor_grid(epsilons: Sequence[float], depth: int, n_line: int = 65, offset: float = 0.05):
    """Midpoints of the remaining components after ``depth`` stages plus two offset lines."""
    _, remaining = cantor_intervals(epsilons, depth)
    mids = np.array([(a + b) / 2 for a, b in remaining], dtype=complex)
    x = np.linspace(-0.25, 1.25, n_line)
    return np.concatenate([mids, x + 1j * offset, x - 1j * offset])


def cantor_convergence(
    epsilons: Sequence[float],
    n_max: int,
    resolution: float = 2.0**-12,
    C: float = 0.06,
    *,
    tolerance: float = 0.005,
    min_points: int = 8,
    workers: int | None = None,
) -> CantorReport:
    """Rows for ``E_n = closure([0,1] minus K_n)``, ``n = 1..n_max``, and the NED verdict.

    The verdict is ``"NED-consistent"`` when the numeric capacities are
    nondecreasing and the last one is within ``tolerance`` of ``cp([0,1])``.
    Depths that cannot be materialized cap the run.
    """
    if not C < 1.0 / (24.0 * math.log(2.0)):
        raise ValueError(f"C = {C!r} must be below 1/(24 log 2) = {1 / (24 * math.log(2)):.6f}")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    eps = [float(e) for e in epsilons]
    if len(eps) == 1:
        eps = eps * n_max
    if len(eps) < n_max:
        raise ValueError(f"{len(eps)} epsilons supplied for n_max = {n_max}")
    config = {
        "epsilons": eps[:n_max],
        "n_max": n_max,
        "resolution": resolution,
        "C": C,
        "tolerance": tolerance,
        "min_points": min_points,
    }

    sets, note = {}, ""
    for n in range(1, n_max + 1):
        try:
            sets[n] = materialize(CantorStage(tuple(eps[:n]), n), resolution, min_points=min_points)
        except MaterializeError as exc:
            note = f"depth capped at {n - 1}: {exc}"
            break
    depth = max(sets) if sets else 0
    if depth == 0:
        raise MaterializeError(note)
    interval = materialize(Segment(0.0, 1.0), resolution)
    grid = cantor_grid(eps, depth)

    def row(n):
        A = sets[n]
        bound = cantor_hausdorff_bound(n)
        alpha = cantor_alpha(eps, n)
        res = equilibrium_measure(A)
        r = ConvergenceRow(
            n=n,
            d_h=hausdorff_distance(A, interval),
            alpha=alpha,
            rate=rate_term(bound, alpha),
            loglog_ok=bool(loglog_condition(bound, alpha)),
            cap_numeric=res.capacity,
            cap_closed=eps[0] / 4.0 if n == 1 else None,
            green_sup_dev=green_sup_deviation(res, green_segment, grid),
            d_h_bound=bound,
            condition_ok=cantor_condition(eps[n - 1], n, C),
        )
        if not res.converged:
            r.note = "solver did not converge"
        return r

    rows = _map(row, range(1, depth + 1), workers)
    caps = [r.cap_numeric for r in rows]
    monotone = all(b >= a - 1e-9 * abs(a) for a, b in zip(caps, caps[1:]))
    close = abs(caps[-1] - INTERVAL_CAPACITY) <= tolerance
    verdict = "NED-consistent" if monotone and close else "inconclusive"
    return CantorReport(rows=rows, verdict=verdict, tolerance=tolerance, max_depth=depth, note=note, config=config)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows, fh=None):
    """CSV with the fixed column set; absent values are empty cells."""
    out = io.StringIO() if fh is None else fh
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(rows, key=lambda r: r.n):
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return out.getvalue() if fh is None else None


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def arc_summary(rows, config: dict, tolerance: float = 0.01) -> dict:
    """Summary for an arc run: does the closed-form capacity reach ``cp(T) = 1``?"""
    last = max(rows, key=lambda r: r.n)
    converging = last.cap_closed is not None and abs(last.cap_closed - 1.0) <= tolerance
    return {
        "verdict": "capacity-converging" if converging else "capacity-not-converging",
        "tolerances": {"capacity": tolerance, "cap_relative_error": 0.02},
        "max_depth": last.n,
        "limit_capacity": 1.0,
        "note": "",
        "config_hash": config_hash(config),
    }
