"""Green's function with pole at infinity and the quantitative bounds around it.

``g_E(z) = V - U(z)`` where ``U`` is the potential of the equilibrium
measure and ``V`` its energy.  The checks compare numeric values of ``g_E``
and of capacity against explicit bounds in terms of the uniformly-perfect
constant.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .potential import CapacityResult, equilibrium_measure, potential_eval
from .sets import DiscreteSet

__all__ = [
    "HolderConstants",
    "BoundReport",
    "LoglogCheck",
    "green_eval",
    "holder_constants",
    "check_holder",
    "check_pommerenke",
    "rate_term",
    "loglog_condition",
    "read_probe_csv",
]

HOLDER_SLACK = 1e-2
POMMERENKE_SLACK = 0.05


@dataclass(frozen=True)
class HolderConstants:
    M: float
    beta: float


@dataclass
class BoundReport:
    """Outcome of a bound check.  ``margin`` is positive when the bound holds."""

    n_samples: int = 0
    n_violations: int = 0
    worst_margin: float = math.inf
    n_skipped: int = 0
    skipped: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    def add(self, point, lhs, rhs, margin, violated):
        self.n_samples += 1
        self.n_violations += int(violated)
        self.worst_margin = min(self.worst_margin, float(margin))
        self.samples.append((complex(point), float(lhs), float(rhs)))

    def skip(self, item, reason):
        self.n_skipped += 1
        self.skipped.append((item, reason))

    @property
    def ok(self) -> bool:
        return self.n_violations == 0

    def to_dict(self, with_samples: bool = False) -> dict:
        d = {
            "n_samples": self.n_samples,
            "n_violations": self.n_violations,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "n_skipped": self.n_skipped,
            "skipped": [{"item": str(item), "reason": reason} for item, reason in self.skipped],
        }
        if with_samples:
            d["samples"] = [
                {"x": z.real, "y": z.imag, "lhs": lhs, "rhs": rhs} for z, lhs, rhs in self.samples
            ]
        return d

    def to_json(self, with_samples: bool = False) -> str:
        return json.dumps(self.to_dict(with_samples), sort_keys=True)


def green_eval(res: CapacityResult, z, *, regularize: bool = False):
    """Green's function of the discretized set at ``z`` (scalar or array).

    Raw values are returned; near the set they can dip slightly below zero.
    """
    if res.measure is None:
        raise ValueError("Green's function needs an equilibrium measure")
    return res.energy - potential_eval(res.measure, z, regularize=regularize)


def holder_constants(alpha: float) -> HolderConstants:
    """Constants of the Hölder bound ``g_E(z) <= M (|z-a|/diam E)**beta``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    M = math.log(384.0 / alpha**2)
    beta = math.log(9.0 / 8.0) / (2.0 * math.log(2.0)) / math.log(288.0 / alpha**2)
    return HolderConstants(M=M, beta=beta)


def _require_member(A: DiscreteSet, a: complex, what: str):
    gap = float(np.abs(A.points - a).min())
    if gap > A.resolution:
        raise ValueError(f"{what} {a!r} is {gap:.3e} away from the set (resolution {A.resolution:.3e})")


def check_holder(res: CapacityResult, A: DiscreteSet, alpha: float, a: complex, probes) -> BoundReport:
    """Compare ``g_E`` with the Hölder bound at each probe.

    ``a`` must be a point of the set.  Probes farther than ``diam`` from
    ``a`` are skipped.  A violation is ``g > bound + 1e-2 + residual``.
    """
    a = complex(a)
    _require_member(A, a, "center")
    hc = holder_constants(alpha)
    diam = A.diam
    slack = HOLDER_SLACK + res.frostman_residual
    report = BoundReport()
    for z in np.asarray(probes, dtype=complex).ravel():
        dist = abs(z - a)
        if dist > diam:
            report.skip(complex(z), "outside the disk |z-a| <= diam")
            continue
        lhs = float(green_eval(res, z, regularize=True))
        rhs = hc.M * (dist / diam) ** hc.beta
        report.add(z, lhs, rhs, rhs - lhs, lhs > rhs + slack)
    return report


def check_pommerenke(A: DiscreteSet, alpha: float, trials, *, min_points: int = 8) -> BoundReport:
    """Check ``cp(E ∩ closed disk(a, r)) >= alpha**2 r / 32`` on each trial ``(a, r)``.

    Each restricted set is solved afresh.  Violations are counted when the
    capacity falls below the bound by more than 5%.
    """
    report = BoundReport()
    for a, r in trials:
        a, r = complex(a), float(r)
        if not 0.0 < r <= A.diam:
            report.skip((a, r), "radius outside (0, diam]")
            continue
        _require_member(A, a, "center")
        mask = np.abs(A.points - a) <= r
        if mask.sum() < min_points:
            report.skip((a, r), f"fewer than {min_points} samples in the disk")
            continue
        cap = equilibrium_measure(A.subset(mask)).capacity
        bound = alpha**2 * r / 32.0
        report.add(a, cap, bound, cap - bound, cap < (1.0 - POMMERENKE_SLACK) * bound)
    return report


def rate_term(d: float, alpha: float) -> float:
    """``d * exp(24 log(1/alpha) * max(0, log log(1/alpha)))``.

    The loglog factor is clamped at zero for ``alpha >= 1/e``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if d < 0:
        raise ValueError("d must be nonnegative")
    if d == 0:
        return 0.0
    L = math.log(1.0 / alpha)
    expo = math.log(d) + 24.0 * L * max(0.0, math.log(L))
    return math.exp(expo) if expo < 709.0 else math.inf


@dataclass(frozen=True)
class LoglogCheck:
    """Truthy iff the condition holds; ``in_regime`` is false when ``log log(1/d) <= 1``."""

    holds: bool
    in_regime: bool

    def __bool__(self):
        return self.holds


def loglog_condition(d: float, alpha: float) -> LoglogCheck:
    """``log(1/alpha) <= log(b) / (24 log log b)`` with ``b = 1/d``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not 0.0 < d < 1.0:
        return LoglogCheck(False, False)
    log_b = -math.log(d)
    loglog_b = math.log(log_b)
    if loglog_b <= 1.0:
        return LoglogCheck(False, False)
    return LoglogCheck(math.log(1.0 / alpha) <= log_b / (24.0 * loglog_b), True)


def read_probe_csv(fh):
    """Read ``x,y[,r]`` rows.  Returns complex points and the radii (or ``None``)."""
    rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError("empty probe file")
    try:
        pts = np.array([complex(float(r["x"]), float(r["y"])) for r in rows])
        radii = None
        if "r" in rows[0] and rows[0]["r"] not in (None, ""):
            radii = np.array([float(r["r"]) for r in rows])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed probe row: {exc}") from None
    return pts, radii
