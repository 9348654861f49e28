"""Discrete equilibrium measures, logarithmic energy and capacity.

The energy of a weight vector ``w`` on a :class:`~logcap.sets.DiscreteSet`
is ``w @ K @ w`` with the kernel from :func:`energy_matrix`.  Minimizing it
over the probability simplex gives the discrete equilibrium measure and the
Robin constant ``V``; the capacity is ``exp(-V)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .sets import (
    ArcFamily,
    CircularArc,
    DiscreteSet,
    FullCircle,
    Segment,
    SetSpec,
)

__all__ = [
    "NumericalError",
    "Measure",
    "CapacityResult",
    "energy_matrix",
    "equilibrium_measure",
    "capacity_leja",
    "leja_points",
    "potential_eval",
    "closed_form_capacity",
    "project_simplex",
]

SUPPORT_TOL = 1e-12


class NumericalError(RuntimeError):
    """The computation left the range where its output means anything."""


@dataclass(frozen=True, eq=False)
class Measure:
    """Discrete probability measure.  ``panel_lengths`` enables self-term regularization."""

    support: np.ndarray
    weights: np.ndarray
    panel_lengths: np.ndarray | None = None

    def __post_init__(self):
        z = np.asarray(self.support, dtype=complex).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if z.shape != w.shape or z.size == 0:
            raise ValueError("support and weights must be non-empty and of equal length")
        if w.min() < -SUPPORT_TOL:
            raise ValueError(f"negative weight {w.min():.3e}")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        if np.unique(z).size != z.size:
            raise ValueError("support points must be distinct")
        object.__setattr__(self, "support", z)
        object.__setattr__(self, "weights", w)
        if self.panel_lengths is not None:
            object.__setattr__(self, "panel_lengths", np.asarray(self.panel_lengths, dtype=float).ravel())

    @classmethod
    def uniform(cls, A: DiscreteSet) -> "Measure":
        return cls(A.points, np.full(len(A), 1.0 / len(A)), A.panel_lengths)

    def to_csv(self, fh=None):
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "y", "weight"])
        for z, wt in zip(self.support, self.weights):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(wt))])
        return out.getvalue() if fh is None else None


@dataclass(frozen=True, eq=False)
class CapacityResult:
    capacity: float
    energy: float
    measure: Measure | None
    frostman_residual: float
    method: str
    n_points: int
    converged: bool = True
    iterations: int = 0
    history: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "energy": self.energy,
            "frostman_residual": self.frostman_residual,
            "method": self.method,
            "n_points": self.n_points,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def energy_matrix(A: DiscreteSet) -> np.ndarray:
    """Symmetric kernel ``K[i,j] = -log|z_i - z_j|`` with ``K[i,i] = log(4/l_i)``.

    The diagonal is the self-energy of a straight panel of length ``l_i``,
    whose capacity is ``l_i/4``.
    """
    z = A.points
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, 1.0)
    if d.min() == 0.0:
        raise ValueError("duplicate points in discrete set")
    K = -np.log(d)
    np.fill_diagonal(K, math.log(4.0) - np.log(A.panel_lengths))
    return K


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{w >= 0, sum(w) = 1}``."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _kkt_solve(K, idx):
    """Minimize w K w with sum(w) = 1 on the index set ``idx`` (no sign constraint)."""
    m = idx.size
    A = np.empty((m + 1, m + 1))
    A[:m, :m] = K[np.ix_(idx, idx)]
    A[:m, m] = 1.0  # unknown is -V, keeping the system symmetric
    A[m, :m] = 1.0
    A[m, m] = 0.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        x = scipy.linalg.solve(A, rhs, assume_a="sym", check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"singular equilibrium system: {exc}") from None
    return x[:m]


def _active_set(K, w0=None, max_iter=None):
    """Primal active-set method for the simplex-constrained quadratic.

    Each step solves the equality-constrained problem on the free indices,
    then either walks toward it until a weight hits zero or frees the bound
    index with the most negative multiplier.  The energy never increases.
    """
    n = K.shape[0]
    max_iter = 10 * n if max_iter is None else max_iter
    w = np.full(n, 1.0 / n) if w0 is None else w0.copy()
    free = np.ones(n, dtype=bool)
    history = [float(w @ K @ w)]
    for it in range(1, max_iter + 1):
        idx = np.nonzero(free)[0]
        p = np.zeros(n)
        p[idx] = _kkt_solve(K, idx)
        if p[idx].min() >= 0.0:
            w = p
            history.append(float(w @ K @ w))
            U = K @ w
            V = float(w @ U)
            lam = U - V
            lam[free] = 0.0
            j = int(np.argmin(lam))
            if lam[j] >= -1e-12 * max(1.0, abs(V)):
                return w, True, it, history
            free[j] = True
        else:
            neg = idx[p[idx] < 0.0]
            t_all = w[neg] / (w[neg] - p[neg])
            t = float(t_all.min())
            w = w + t * (p - w)
            hit = neg[t_all <= t * (1 + 1e-12)]
            w[hit] = 0.0
            free[hit] = False
            w = np.maximum(w, 0.0)
            w /= w.sum()
            history.append(float(w @ K @ w))
    return w, False, max_iter, history


def _projected_gradient(K, w0=None, rtol=1e-10, max_iter=None):
    """Monotone accelerated projected gradient (FISTA with a descent safeguard)."""
    n = K.shape[0]
    max_iter = 10 * n if max_iter is None else max_iter
    step = 1.0 / (2.0 * float(np.linalg.norm(K, 2)))
    x = np.full(n, 1.0 / n) if w0 is None else project_simplex(w0)
    fx = float(x @ K @ x)
    y, t = x.copy(), 1.0
    history = [fx]
    for it in range(1, max_iter + 1):
        zc = project_simplex(y - step * 2.0 * (K @ y))
        fz = float(zc @ K @ zc)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        if fz <= fx:
            x_new, f_new = zc, fz
        else:
            x_new, f_new = x, fx
        y = x_new + (t / t_next) * (zc - x_new) + ((t - 1.0) / t_next) * (x_new - x)
        t = t_next
        decrease = fx - f_new
        x, fx = x_new, f_new
        history.append(fx)
        if 0.0 <= decrease < rtol * max(1.0, abs(fx)) and fz <= fx + rtol * max(1.0, abs(fx)):
            return x, True, it, history
        if fz > fx:
            y, t = x.copy(), 1.0  # restart momentum
    return x, False, max_iter, history


def equilibrium_measure(A: DiscreteSet, *, solver: str = "active_set", max_iter: int | None = None) -> CapacityResult:
    """Discrete equilibrium measure and capacity of ``A``.

    ``solver="active_set"`` (default) is exact up to round-off on the sets
    used here, where every equilibrium weight is positive and a single linear
    solve suffices.  ``solver="pgd"`` runs projected gradient with the
    stopping rule ``relative decrease < 1e-10`` or ``10*N`` iterations.
    A run that exhausts its budget returns the best iterate with
    ``converged=False``; the Frostman residual then shows how far off it is.
    """
    n = len(A)
    if n < 2:
        raise ValueError("equilibrium measure needs at least two points")
    K = energy_matrix(A)
    if solver == "active_set":
        w, ok, it, hist = _active_set(K, max_iter=max_iter)
    elif solver == "pgd":
        w, ok, it, hist = _projected_gradient(K, max_iter=max_iter)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    w = np.maximum(w, 0.0)
    w /= w.sum()
    U = K @ w
    V = float(w @ U)
    on = w > SUPPORT_TOL
    residual = float(np.abs(U[on] - V).max())
    cap = math.exp(-V) if V < 745.0 else 0.0
    if cap == 0.0:
        raise NumericalError(f"energy {V:.3e} underflows the capacity")
    return CapacityResult(
        capacity=cap,
        energy=V,
        measure=Measure(A.points, w, A.panel_lengths),
        frostman_residual=residual,
        method="qp",
        n_points=n,
        converged=ok,
        iterations=it,
        history=tuple(hist),
    )


def leja_points(A: DiscreteSet, N: int):
    """Greedy Leja selection of ``N + 1`` samples from ``A``.

    Returns ``(indices, log_products)`` where ``log_products[k]`` is the sum of
    ``log|z_{k+1} - z_j|`` over the ``k + 1`` previously chosen points.
    """
    z = A.points if isinstance(A, DiscreteSet) else np.asarray(A, dtype=complex).ravel()
    if z.size < 2:
        raise ValueError("Leja selection needs at least two candidate points")
    if not 1 <= N <= z.size - 1:
        raise ValueError(f"N must lie in 1..{z.size - 1} for {z.size} samples")
    i = int(np.argmax(np.abs(z - z.mean())))
    s = np.zeros(z.size)
    taken = np.zeros(z.size, dtype=bool)
    order = [i]
    logs = np.empty(N)
    with np.errstate(divide="ignore"):
        for k in range(N):
            taken[i] = True
            s += np.log(np.abs(z - z[i]))
            s[taken] = -np.inf
            i = int(np.argmax(s))
            order.append(i)
            logs[k] = s[i]
    return np.array(order), logs


def capacity_leja(A: DiscreteSet, N: int) -> float:
    """Transfinite-diameter estimate ``(prod_{k<N} |z_N - z_k|)**(1/N)`` along a Leja sequence.

    Converges to the capacity, typically from above and slowly.  The sample
    set should be several times denser than ``N`` or the forced picks near
    already chosen points drag the estimate down.
    """
    _, logs = leja_points(A, N)
    if not np.isfinite(logs[-1]):
        raise NumericalError("Leja sequence ran into coincident points")
    return float(math.exp(logs[-1] / N))


def potential_eval(m: Measure, z, *, regularize: bool = False, tol: float = 1e-14):
    """Logarithmic potential ``sum_i w_i log(1/|z - z_i|)`` at one or many points.

    A point that coincides with a support point is an error unless
    ``regularize`` is set; then that term uses ``log(4/l_i)``.
    """
    zz = np.asarray(z, dtype=complex)
    flat = zz.ravel()
    out = np.empty(flat.size)
    chunk = max(1, 2_000_000 // m.support.size)
    for i0 in range(0, flat.size, chunk):
        d = np.abs(flat[i0 : i0 + chunk, None] - m.support[None, :])
        hit = d <= tol
        if hit.any():
            if not regularize or m.panel_lengths is None:
                raise ValueError("potential evaluated on a support point")
            d = np.where(hit, m.panel_lengths[None, :] / 4.0, d)
        out[i0 : i0 + chunk] = -np.log(d) @ m.weights
    return float(out[0]) if zz.ndim == 0 else out.reshape(zz.shape)


def closed_form_capacity(spec: SetSpec) -> float | None:
    """Exact capacity where a formula is known; ``None`` otherwise."""
    if isinstance(spec, ArcFamily):
        return math.sin(spec.L / 2) ** (1.0 / spec.n)
    if isinstance(spec, CircularArc):
        return math.sin(spec.L / 2)
    if isinstance(spec, FullCircle):
        return float(spec.radius)
    if isinstance(spec, Segment):
        return abs(spec.b - spec.a) / 4.0
    return None
