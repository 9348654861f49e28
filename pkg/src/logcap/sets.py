"""Compact plane sets: declarative specs, panel discretization, and geometry.

A set is described by one of the small frozen spec classes below and turned
into a :class:`DiscreteSet` by :func:`materialize`.  Points are stored as
complex numbers throughout.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

__all__ = [
    "ArcFamily",
    "CantorStage",
    "Segment",
    "CircularArc",
    "FullCircle",
    "PointCloud",
    "SetSpec",
    "SpecError",
    "MaterializeError",
    "DiscreteSet",
    "UPEstimate",
    "materialize",
    "resolution_for",
    "hausdorff_distance",
    "diameter",
    "estimate_alpha",
    "alpha_grid",
    "arc_alpha_lower",
    "cantor_alpha",
    "cantor_hausdorff_bound",
    "cantor_intervals",
    "spec_to_dict",
    "spec_from_dict",
]


class SpecError(ValueError):
    """Invalid set description; the message names the offending field."""


class MaterializeError(ValueError):
    """A component cannot be represented at the requested resolution."""


def _positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise SpecError(f"field '{name}': expected a positive integer, got {value!r}")


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise SpecError(f"field '{name}': expected a real number, got {value!r}")
    if not math.isfinite(value):
        raise SpecError(f"field '{name}': must be finite, got {value!r}")


@dataclass(frozen=True)
class ArcFamily:
    """``{z on the unit circle : |arg(z**n)| <= L}``: ``n`` equal arcs of length ``2L/n``."""

    n: int
    L: float
    kind = "arc_family"

    def __post_init__(self):
        _positive_int("n", self.n)
        _finite("L", self.L)
        if self.n == 1 and self.L == math.pi:
            return  # collapses to the full unit circle
        if not 0.0 < self.L < math.pi:
            raise SpecError(f"field 'L': expected 0 < L < pi, got {self.L!r}")


@dataclass(frozen=True)
class CantorStage:
    """Closure of ``[0,1] \\ K_depth``: the union of all middle parts removed so far."""

    epsilons: tuple
    depth: int
    kind = "cantor_stage"

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if isinstance(self.depth, bool) or not isinstance(self.depth, (int, np.integer)) or self.depth < 1:
            raise SpecError(f"field 'depth': expected a positive integer, got {self.depth!r}")
        if self.depth > len(self.epsilons):
            raise SpecError(
                f"field 'depth': {self.depth} exceeds the {len(self.epsilons)} epsilons supplied"
            )
        for k, e in enumerate(self.epsilons):
            if not 0.0 < e < 1.0:
                raise SpecError(f"field 'epsilons': entry {k} = {e!r} is not in (0, 1)")


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex
    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == self.b:
            raise SpecError("field 'b': segment endpoints must be distinct")


@dataclass(frozen=True)
class CircularArc:
    """``{exp(it) : |t| <= L}``."""

    L: float
    kind = "circular_arc"

    def __post_init__(self):
        _finite("L", self.L)
        if not 0.0 < self.L <= math.pi:
            raise SpecError(f"field 'L': expected 0 < L <= pi, got {self.L!r}")


@dataclass(frozen=True)
class FullCircle:
    radius: float = 1.0
    kind = "full_circle"

    def __post_init__(self):
        _finite("radius", self.radius)
        if self.radius <= 0:
            raise SpecError(f"field 'radius': must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class PointCloud:
    points: tuple
    kind = "point_cloud"

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if not pts:
            raise SpecError("field 'points': empty point cloud")
        if len(set(pts)) != len(pts):
            raise SpecError("field 'points': duplicate points")
        object.__setattr__(self, "points", pts)


SetSpec = Union[ArcFamily, CantorStage, Segment, CircularArc, FullCircle, PointCloud]
_KINDS = {cls.kind: cls for cls in (ArcFamily, CantorStage, Segment, CircularArc, FullCircle, PointCloud)}


def _point_to_json(z):
    return [float(z.real), float(z.imag)]


def _point_from_json(name, value):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise SpecError(f"field '{name}': expected a point [x, y], got {value!r}")


def spec_to_dict(spec: SetSpec) -> dict:
    if isinstance(spec, ArcFamily):
        return {"kind": spec.kind, "n": spec.n, "L": spec.L}
    if isinstance(spec, CantorStage):
        return {"kind": spec.kind, "epsilons": list(spec.epsilons), "depth": spec.depth}
    if isinstance(spec, Segment):
        return {"kind": spec.kind, "a": _point_to_json(spec.a), "b": _point_to_json(spec.b)}
    if isinstance(spec, CircularArc):
        return {"kind": spec.kind, "L": spec.L}
    if isinstance(spec, FullCircle):
        return {"kind": spec.kind, "radius": spec.radius}
    if isinstance(spec, PointCloud):
        return {"kind": spec.kind, "points": [_point_to_json(p) for p in spec.points]}
    raise TypeError(f"not a set spec: {spec!r}")


def spec_from_dict(data: dict) -> SetSpec:
    """Inverse of :func:`spec_to_dict`.  Raises :class:`SpecError` naming the bad field."""
    if not isinstance(data, dict):
        raise SpecError(f"set spec must be a JSON object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind not in _KINDS:
        raise SpecError(f"field 'kind': unknown set kind {kind!r}; expected one of {sorted(_KINDS)}")

    def need(name):
        if name not in data:
            raise SpecError(f"field '{name}': missing for kind {kind!r}")
        return data[name]

    if kind == "arc_family":
        return ArcFamily(n=need("n"), L=need("L"))
    if kind == "cantor_stage":
        eps = need("epsilons")
        if not isinstance(eps, list):
            raise SpecError("field 'epsilons': expected a list of numbers")
        for e in eps:
            _finite("epsilons", e)
        return CantorStage(epsilons=tuple(eps), depth=need("depth"))
    if kind == "segment":
        return Segment(_point_from_json("a", need("a")), _point_from_json("b", need("b")))
    if kind == "circular_arc":
        return CircularArc(L=need("L"))
    if kind == "full_circle":
        return FullCircle(radius=data.get("radius", 1.0))
    pts = need("points")
    if not isinstance(pts, list):
        raise SpecError("field 'points': expected a list of [x, y] pairs")
    return PointCloud(tuple(_point_from_json("points", p) for p in pts))


@dataclass(frozen=True, eq=False)
class DiscreteSet:
    """Sample points of a compact set with the arclength each point stands for.

    ``component`` labels which connected piece each point was sampled from
    (all zeros for a point cloud).
    """

    points: np.ndarray
    panel_lengths: np.ndarray
    component: np.ndarray = field(default=None)
    resolution: float = field(init=False)
    diam: float = field(init=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=complex).ravel()
        lens = np.ascontiguousarray(self.panel_lengths, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("a discrete set needs at least one point")
        if lens.shape != pts.shape:
            raise ValueError("panel_lengths must match points")
        if not np.all(lens > 0):
            raise ValueError("panel lengths must be positive")
        comp = np.zeros(pts.size, dtype=int) if self.component is None else np.asarray(self.component, dtype=int)
        pts.setflags(write=False)
        lens.setflags(write=False)
        comp.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "panel_lengths", lens)
        object.__setattr__(self, "component", comp)
        object.__setattr__(self, "resolution", float(lens.max()))
        object.__setattr__(self, "diam", _diameter(pts) if pts.size > 1 else 0.0)

    def __len__(self):
        return self.points.size

    @property
    def n_components(self) -> int:
        return int(np.unique(self.component).size)

    def subset(self, mask) -> "DiscreteSet":
        mask = np.asarray(mask)
        return DiscreteSet(self.points[mask], self.panel_lengths[mask], self.component[mask])

    def union(self, other: "DiscreteSet") -> "DiscreteSet":
        comp = np.concatenate([self.component, other.component + self.component.max() + 1])
        return DiscreteSet(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.panel_lengths, other.panel_lengths]),
            comp,
        )

    def transformed(self, scale: float = 1.0, shift: complex = 0.0, angle: float = 0.0) -> "DiscreteSet":
        """Image under ``z -> scale * exp(i*angle) * z + shift``."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        rot = scale * np.exp(1j * angle)
        return DiscreteSet(rot * self.points + shift, scale * self.panel_lengths, self.component)

    def to_csv(self, fh=None) -> str | None:
        """Write ``x,y,panel_length`` rows.  Returns the text when no file is given."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "y", "panel_length"])
        for z, ell in zip(self.points, self.panel_lengths):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(ell))])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, fh) -> "DiscreteSet":
        rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError("empty point file")
        try:
            pts = [complex(float(r["x"]), float(r["y"])) for r in rows]
            lens = [float(r["panel_length"]) for r in rows]
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed point file: {exc}") from None
        return cls(np.array(pts), np.array(lens))


def _closed_panels(length, target_resolution, min_points):
    # nodes include both ends; end panels carry half weight
    m = max(min_points, int(math.ceil(length / target_resolution - 1e-9)) + 1)
    h = length / (m - 1)
    lens = np.full(m, h)
    lens[0] = lens[-1] = h / 2
    return m, lens


def _check_panel(length, m, min_panel, what):
    if length / (m - 1) < min_panel:
        raise MaterializeError(
            f"{what} of length {length:.3e} cannot carry {m} distinct samples "
            f"(panel {length / (m - 1):.3e} below floor {min_panel:.1e})"
        )


def cantor_intervals(epsilons: Sequence[float], depth: int):
    """Removed intervals and remaining components after ``depth`` stages.

    Returns ``(removed, remaining)``, each a list of ``(left, right)`` pairs in
    increasing order.  ``removed`` makes up ``E_depth``, ``remaining`` is ``K_depth``.
    """
    remaining = [(0.0, 1.0)]
    removed = []
    for k in range(depth):
        e = epsilons[k]
        nxt = []
        for a, b in remaining:
            ell = b - a
            m0 = a + 0.5 * (1.0 - e) * ell
            m1 = a + 0.5 * (1.0 + e) * ell
            removed.append((m0, m1))
            nxt.append((a, m0))
            nxt.append((m1, b))
        remaining = nxt
    removed.sort()
    return removed, remaining


def materialize(
    spec: SetSpec,
    target_resolution: float,
    *,
    min_points: int = 8,
    min_panel: float = 1e-10,
) -> DiscreteSet:
    """Sample ``spec`` uniformly by arclength, component by component.

    Every component gets at least ``min_points`` samples, so short components
    are sampled more finely than ``target_resolution``.  A component whose
    panels would fall below ``min_panel`` raises :class:`MaterializeError`;
    components are never dropped.  Point clouds get panel length
    ``target_resolution`` at every point.
    """
    if not target_resolution > 0:
        raise ValueError("target_resolution must be positive")
    if min_points < 2:
        raise ValueError("min_points must be at least 2")
    pieces = []

    if isinstance(spec, FullCircle) or (
        isinstance(spec, (ArcFamily, CircularArc)) and spec.L == math.pi and getattr(spec, "n", 1) == 1
    ):
        radius = spec.radius if isinstance(spec, FullCircle) else 1.0
        length = 2 * math.pi * radius
        m = max(min_points, int(math.ceil(length / target_resolution - 1e-9)))
        _check_panel(length, m + 1, min_panel, "circle")
        t = 2 * np.pi * np.arange(m) / m
        pieces.append((radius * np.exp(1j * t), np.full(m, length / m)))
    elif isinstance(spec, ArcFamily):
        half = spec.L / spec.n
        for k in range(spec.n):
            m, lens = _closed_panels(2 * half, target_resolution, min_points)
            _check_panel(2 * half, m, min_panel, f"arc {k}")
            t = 2 * np.pi * k / spec.n + np.linspace(-half, half, m)
            pieces.append((np.exp(1j * t), lens))
    elif isinstance(spec, CircularArc):
        m, lens = _closed_panels(2 * spec.L, target_resolution, min_points)
        _check_panel(2 * spec.L, m, min_panel, "arc")
        pieces.append((np.exp(1j * np.linspace(-spec.L, spec.L, m)), lens))
    elif isinstance(spec, Segment):
        length = abs(spec.b - spec.a)
        m, lens = _closed_panels(length, target_resolution, min_points)
        _check_panel(length, m, min_panel, "segment")
        s = np.linspace(0.0, 1.0, m)
        pieces.append((spec.a + s * (spec.b - spec.a), lens))
    elif isinstance(spec, CantorStage):
        removed, _ = cantor_intervals(spec.epsilons, spec.depth)
        for k, (a, b) in enumerate(removed):
            m, lens = _closed_panels(b - a, target_resolution, min_points)
            _check_panel(b - a, m, min_panel, f"component {k}")
            pieces.append((np.linspace(a, b, m) + 0j, lens))
    elif isinstance(spec, PointCloud):
        pts = np.array(spec.points, dtype=complex)
        pieces.append((pts, np.full(pts.size, float(target_resolution))))
    else:
        raise TypeError(f"not a set spec: {spec!r}")

    comp = np.concatenate([np.full(p.size, k) for k, (p, _) in enumerate(pieces)])
    if isinstance(spec, PointCloud):
        comp = np.zeros(comp.size, dtype=int)
    return DiscreteSet(
        np.concatenate([p for p, _ in pieces]),
        np.concatenate([ell for _, ell in pieces]),
        comp,
    )


def resolution_for(spec: SetSpec, n_points: int) -> float:
    """Resolution at which a single-component spec materializes to ``n_points`` samples."""
    if isinstance(spec, FullCircle):
        return 2 * math.pi * spec.radius / n_points
    if isinstance(spec, CircularArc):
        if spec.L == math.pi:
            return 2 * math.pi / n_points
        return 2 * spec.L / (n_points - 1)
    if isinstance(spec, Segment):
        return abs(spec.b - spec.a) / (n_points - 1)
    raise TypeError(f"{type(spec).__name__} has no single-component point count")


def hausdorff_distance(A: DiscreteSet, B: DiscreteSet) -> float:
    """Exact Hausdorff distance between the two sample sets.

    Against the underlying continuous sets the error is at most
    ``A.resolution + B.resolution``.
    """
    pa = _as_points(A)
    pb = _as_points(B)
    if pa.size == 0 or pb.size == 0:
        raise ValueError("Hausdorff distance of an empty set")
    xa = np.column_stack([pa.real, pa.imag])
    xb = np.column_stack([pb.real, pb.imag])
    d_ab = cKDTree(xb).query(xa)[0].max()
    d_ba = cKDTree(xa).query(xb)[0].max()
    return float(max(d_ab, d_ba))


def _as_points(A):
    if isinstance(A, DiscreteSet):
        return A.points
    return np.asarray(A, dtype=complex).ravel()


def _brute_diameter(pts, chunk=2048):
    best = 0.0
    for i in range(0, pts.size, chunk):
        best = max(best, float(np.abs(pts[i : i + chunk, None] - pts[None, :]).max()))
    return best


def _diameter(pts):
    if pts.size <= 512:
        return _brute_diameter(pts)
    xy = np.column_stack([pts.real, pts.imag])
    try:
        hull = ConvexHull(xy)
    except QhullError:
        # collinear: the extreme pair contains the point farthest from any sample
        far = pts[np.argmax(np.abs(pts - pts[0]))]
        return float(np.abs(pts - far).max())
    return _brute_diameter(pts[hull.vertices])


def diameter(A: DiscreteSet) -> float:
    """Largest pairwise distance (convex-hull fast path for large sets)."""
    pts = _as_points(A)
    if pts.size < 2:
        raise ValueError("diameter needs at least two points")
    return _diameter(pts)


@dataclass(frozen=True)
class UPEstimate:
    """Bracket on the uniformly-perfect constant seen at the sampling scale.

    ``alpha_upper`` is certified by ``witness``: the closed annulus
    ``alpha_upper*r <= |z - center| <= r`` (padded by half a panel) holds no
    sample, so the set is not ``alpha_upper``-uniformly perfect.
    ``alpha_lower`` is the largest grid value at which every tested annulus
    met the set, reduced by the sampling slack.
    """

    alpha_lower: float
    alpha_upper: float
    witness: tuple | None = None
    slack: float = 0.0

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = {"center": _point_to_json(self.witness[0]), "r": float(self.witness[1])}
        return {
            "alpha_lower": self.alpha_lower,
            "alpha_upper": self.alpha_upper,
            "witness": w,
            "slack": self.slack,
        }


def alpha_grid(step: float = 0.01, q: float = 1.05, floor: float = 1e-9) -> np.ndarray:
    """Multiples of ``step`` in (0, 1], continued geometrically below ``step``."""
    linear = step * np.arange(1, int(round(1 / step)) + 1)
    n_geo = int(math.ceil(math.log(step / floor) / math.log(q)))
    geo = step * q ** -np.arange(n_geo, 0, -1)
    return np.concatenate([geo, linear])


def estimate_alpha(
    A: DiscreteSet,
    *,
    q: float = 1.05,
    r_min: float | None = None,
    grid: np.ndarray | None = None,
) -> UPEstimate:
    """Bracket the uniformly-perfect constant of a discrete set.

    Every sample serves as a center; radii run geometrically (ratio ``q``)
    from ``r_min`` (default ``8*resolution``) up to the diameter.  For each
    pair ``(a, r)`` the largest admissible alpha is ``(d + h/2)/r`` where
    ``d`` is the largest sample distance not exceeding ``r + h/2`` and ``h``
    the resolution.
    """
    pts = A.points
    if pts.size < 2 or A.diam == 0:
        raise ValueError("estimate_alpha needs a set with two distinct points")
    h = A.resolution
    r_min = 8 * h if r_min is None else float(r_min)
    grid = alpha_grid() if grid is None else np.sort(np.asarray(grid, dtype=float))
    diam = A.diam
    if r_min >= diam:
        radii = np.array([diam])
    else:
        k = int(math.floor(math.log(diam / r_min) / math.log(q)))
        radii = np.unique(np.append(r_min * q ** np.arange(k + 1), diam))

    best_ratio = np.inf
    best = None
    chunk = max(1, 4_000_000 // pts.size)
    for i0 in range(0, pts.size, chunk):
        D = np.sort(np.abs(pts[i0 : i0 + chunk, None] - pts[None, :]), axis=1)
        for j, row in enumerate(D):
            idx = np.searchsorted(row, radii + h / 2, side="right") - 1
            ratio = (row[idx] + h / 2) / radii
            k = int(np.argmin(ratio))
            if ratio[k] < best_ratio:
                best_ratio = float(ratio[k])
                best = (complex(pts[i0 + j]), float(radii[k]))

    slack = 2 * h / r_min
    above = grid[grid > best_ratio]
    below = grid[grid <= best_ratio]
    if above.size == 0:
        upper, witness = 1.0, None
    else:
        upper, witness = float(above[0]), best
    lower = float(below[-1]) if below.size else 0.0
    lower = round(max(0.0, min(lower, upper) - slack), 12)
    return UPEstimate(alpha_lower=lower, alpha_upper=upper, witness=witness, slack=slack)


def arc_alpha_lower(n: int, L: float) -> float:
    """Lower bound on the uniformly-perfect constant of ``ArcFamily(n, L)``."""
    if not 0 < L < math.pi:
        raise ValueError("L must lie in (0, pi)")
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 / (1.0 + 2.0 * math.sin((math.pi - L) / n) / math.sin(L / n))


def cantor_alpha(epsilons: Sequence[float], n: int) -> float:
    """Half the smallest removed fraction among the first ``n`` stages."""
    if n < 1 or n > len(epsilons):
        raise ValueError(f"n must lie in 1..{len(epsilons)}")
    head = [float(e) for e in epsilons[:n]]
    if not all(0 < e < 1 for e in head):
        raise ValueError("every epsilon must lie in (0, 1)")
    return 0.5 * min(head)


def cantor_hausdorff_bound(n: int) -> float:
    """The bound ``2**-(n+1)`` on ``d_H(E_n, [0,1])`` used for the loglog test."""
    if n < 1:
        raise ValueError("n must be positive")
    return 2.0 ** (-n - 1)
