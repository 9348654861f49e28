import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logcap.potential import (
    Measure,
    NumericalError,
    capacity_leja,
    closed_form_capacity,
    energy_matrix,
    equilibrium_measure,
    leja_points,
    potential_eval,
    project_simplex,
)
from logcap.sets import (
    ArcFamily,
    CantorStage,
    CircularArc,
    DiscreteSet,
    FullCircle,
    PointCloud,
    Segment,
    materialize,
)

from conftest import sample


def pair(d, ell=1.0):
    return DiscreteSet(np.array([0, d], dtype=complex), np.array([ell, ell]))


# --- kernel ----------------------------------------------------------------


def test_kernel_examples():
    assert energy_matrix(pair(1.0))[0, 1] == 0.0
    assert energy_matrix(pair(math.exp(-1)))[0, 1] == pytest.approx(1.0)
    assert energy_matrix(pair(1.0, ell=4.0))[0, 0] == 0.0


def test_kernel_symmetric_and_finite():
    A = materialize(ArcFamily(4, 1.0), 0.02)
    K = energy_matrix(A)
    assert np.array_equal(K, K.T)
    assert np.isfinite(K).all()
    assert np.allclose(np.diag(K), np.log(4 / A.panel_lengths))


def test_kernel_rejects_duplicates():
    A = DiscreteSet(np.array([0, 1, 1], dtype=complex), np.ones(3))
    with pytest.raises(ValueError, match="duplicate"):
        energy_matrix(A)


# --- equilibrium measure ---------------------------------------------------


def test_circle_benchmark():
    res = equilibrium_measure(sample(FullCircle(1), 512))
    assert res.capacity == pytest.approx(1.0, abs=0.01)
    w = res.measure.weights
    assert np.allclose(w, 1 / 512, rtol=0.01)
    assert res.capacity == math.exp(-res.energy)
    assert res.method == "qp"


def test_segment_benchmark():
    res = equilibrium_measure(sample(Segment(0, 1), 800))
    assert res.capacity == pytest.approx(0.25, abs=0.0025)
    # arcsine density: endpoint weights dominate the midpoint ones
    w = res.measure.weights
    assert w[0] > w[400] and w[-1] > w[400]


@pytest.mark.parametrize("L", [math.pi / 2, 1.0, 2.0])
def test_arc_benchmark(L):
    res = equilibrium_measure(sample(CircularArc(L), 512))
    assert res.capacity == pytest.approx(math.sin(L / 2), rel=0.01)


@pytest.mark.parametrize(
    "spec",
    [FullCircle(1), Segment(0, 1), CircularArc(1.0), ArcFamily(4, 1.0), CantorStage((1 / 3,) * 4, 4)],
)
def test_frostman_residual_small(spec):
    A = materialize(spec, 0.01)
    res = equilibrium_measure(A)
    h = A.resolution
    assert res.frostman_residual <= 10 * h * abs(math.log(h))
    m = res.measure
    assert (m.weights >= -1e-12).all()
    assert abs(m.weights.sum() - 1) <= 1e-12


def test_pgd_agrees_with_active_set():
    A = materialize(ArcFamily(3, 1.0), 0.02)
    a = equilibrium_measure(A)
    p = equilibrium_measure(A, solver="pgd")
    assert p.capacity == pytest.approx(a.capacity, rel=1e-3)
    assert p.energy >= a.energy - 1e-12
    h = np.asarray(p.history)
    assert (np.diff(h) <= 1e-12).all()


def test_history_monotone_with_inactive_points():
    # interior points carry no equilibrium mass, so the active set has to drop them
    circ = materialize(FullCircle(), 0.05)
    inner = 0.5 * np.exp(2j * np.pi * np.arange(7) / 7)
    A = circ.union(DiscreteSet(inner, np.full(7, 0.05)))
    res = equilibrium_measure(A)
    assert np.all(res.measure.weights[-7:] <= 1e-12)
    assert (np.diff(res.history) <= 1e-12).all()
    assert res.capacity == pytest.approx(equilibrium_measure(circ).capacity, rel=1e-9)
    p = equilibrium_measure(A, solver="pgd")
    assert (np.diff(p.history) <= 1e-12).all()
    assert p.capacity == pytest.approx(res.capacity, rel=1e-3)


def test_budget_exhaustion_is_flagged():
    A = materialize(Segment(0, 1), 0.01)
    res = equilibrium_measure(A, solver="pgd", max_iter=3)
    assert not res.converged
    assert res.frostman_residual > equilibrium_measure(A).frostman_residual


def test_equilibrium_errors():
    with pytest.raises(ValueError):
        equilibrium_measure(DiscreteSet(np.array([0j]), np.ones(1)))
    with pytest.raises(ValueError, match="solver"):
        equilibrium_measure(materialize(Segment(0, 1), 0.1), solver="newton")


def test_underflow_is_an_error():
    # two denormal-spaced samples push the energy past the exp underflow threshold
    A = DiscreteSet(np.array([0, 5e-324], dtype=complex), np.array([5e-324, 5e-324]))
    with pytest.raises(NumericalError):
        equilibrium_measure(A)


def test_result_json():
    res = equilibrium_measure(materialize(Segment(0, 1), 0.1))
    assert set(res.to_dict()) == {"capacity", "energy", "frostman_residual", "method", "n_points"}


# --- invariance and monotonicity --------------------------------------------


BENCHMARKS = [FullCircle(1), Segment(0, 1), CircularArc(math.pi / 2), CircularArc(1.0), CircularArc(2.0)]


@pytest.mark.parametrize("spec", BENCHMARKS)
@pytest.mark.parametrize("scale, shift, angle", [(0.3, 2 - 1j, 0.4), (5.0, 10j, -2.5)])
def test_capacity_similarity(spec, scale, shift, angle):
    A = materialize(spec, 0.02)
    c0 = equilibrium_measure(A).capacity
    c1 = equilibrium_measure(A.transformed(scale, shift, angle)).capacity
    assert c1 == pytest.approx(scale * c0, rel=0.005)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_adding_points_never_lowers_capacity(seed, k):
    rng = np.random.default_rng(seed)
    A = materialize(Segment(0, 1), 0.05)
    extra = rng.uniform(-1, 2, k) + 1j * rng.uniform(-1, 1, k)
    extra = extra[np.abs(extra[:, None] - A.points[None, :]).min(axis=1) > 1e-6]
    B = A.union(DiscreteSet(extra, np.full(extra.size, 0.05)))
    assert equilibrium_measure(B).capacity >= equilibrium_measure(A).capacity * (1 - 1e-9)


# --- Leja oracle -----------------------------------------------------------


def test_leja_circle():
    est = capacity_leja(materialize(FullCircle(), 2 * math.pi / 1024), 256)
    assert 1.00 <= est <= 1.05


def test_leja_segment():
    est = capacity_leja(materialize(Segment(0, 1), 1 / 1024), 256)
    assert 0.25 <= est <= 0.27


def test_leja_errors_and_determinism():
    A = materialize(Segment(0, 1), 0.1)
    with pytest.raises(ValueError):
        capacity_leja(A, len(A))
    with pytest.raises(ValueError):
        capacity_leja(DiscreteSet(np.array([1j]), np.ones(1)), 1)
    i1, _ = leja_points(A, 5)
    i2, _ = leja_points(A, 5)
    assert np.array_equal(i1, i2)
    # both ends are equally far from the centroid: the lower index wins
    assert i1[0] == 0


@pytest.mark.parametrize("spec", [FullCircle(1), Segment(0, 1), CircularArc(1.0)])
def test_oracle_agreement(spec):
    qp = equilibrium_measure(sample(spec, 512)).capacity
    lj = capacity_leja(sample(spec, 2048), 512)
    assert abs(lj - qp) <= 0.05 * qp


# --- potentials ------------------------------------------------------------


def test_point_mass_potential():
    m = Measure(np.array([0j]), np.array([1.0]))
    assert potential_eval(m, math.e) == pytest.approx(-1.0)
    with pytest.raises(ValueError, match="support"):
        potential_eval(m, 0.0)


def test_uniform_circle_potential():
    m = Measure.uniform(materialize(FullCircle(), 2 * math.pi / 512))
    assert potential_eval(m, 2.0) == pytest.approx(-math.log(2), abs=1e-10)
    assert potential_eval(m, 0.5j) == pytest.approx(0.0, abs=1e-10)
    z = np.array([[2, 3j], [0.1, -0.5]])
    assert potential_eval(m, z).shape == (2, 2)


def test_regularized_self_term():
    A = materialize(Segment(0, 1), 0.1)
    m = Measure(A.points, np.full(len(A), 1 / len(A)), A.panel_lengths)
    K = energy_matrix(A)
    assert potential_eval(m, A.points, regularize=True) == pytest.approx(K @ m.weights)


def test_measure_invariants():
    with pytest.raises(ValueError):
        Measure(np.array([0, 1], dtype=complex), np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        Measure(np.array([0, 1], dtype=complex), np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        Measure(np.array([1, 1], dtype=complex), np.array([0.5, 0.5]))


def test_measure_csv():
    res = equilibrium_measure(materialize(Segment(0, 1), 0.25))
    text = res.measure.to_csv()
    lines = text.splitlines()
    assert lines[0] == "x,y,weight"
    assert len(lines) == 1 + res.n_points
    back = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    assert back[:, 2].sum() == pytest.approx(1.0)


def test_project_simplex():
    w = project_simplex(np.array([0.2, -1.0, 3.0, 0.5]))
    assert w.sum() == pytest.approx(1.0)
    assert (w >= 0).all()
    assert np.array_equal(project_simplex(np.array([0.25] * 4)), np.array([0.25] * 4))


# --- closed forms ----------------------------------------------------------


def test_closed_forms():
    assert closed_form_capacity(ArcFamily(4, 1.0)) == pytest.approx(0.8321091, rel=1e-6)
    assert closed_form_capacity(CircularArc(math.pi / 2)) == pytest.approx(math.sqrt(2) / 2)
    assert closed_form_capacity(FullCircle(1)) == 1.0
    assert closed_form_capacity(Segment(1j, 4 + 4j)) == pytest.approx(1.25)
    assert closed_form_capacity(CantorStage((0.5,), 1)) is None
    assert closed_form_capacity(PointCloud((0, 1))) is None
