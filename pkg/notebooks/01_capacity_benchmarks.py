# ---
# jupyter:
#   jupytext:
#     text_representation:
#       format_name: light
# ---

# # Capacity of sets with known answers
#
# The logarithmic capacity of a compact plane set is `exp(-V)`, where `V` is
# the smallest logarithmic energy a unit measure on the set can have.  For a
# few sets we know it exactly: the unit circle has capacity 1, a segment of
# length `l` has `l/4`, and a circular arc of half-angle `L` has `sin(L/2)`.
# Here the discrete solver is compared against those values and against the
# Leja-sequence estimate, which uses no linear algebra at all.

import math

import numpy as np

from logcap import (
    CircularArc,
    FullCircle,
    Segment,
    capacity_leja,
    closed_form_capacity,
    equilibrium_measure,
    materialize,
    resolution_for,
)

# Each set is sampled by arclength into panels.  The energy matrix uses
# `-log|z_i - z_j|` off the diagonal and the self-energy of a straight panel,
# `log(4/l_i)`, on it.

specs = [FullCircle(1), Segment(0, 1), CircularArc(math.pi / 2), CircularArc(1.0), CircularArc(2.0)]
print(f"{'set':28s} {'N':>5s} {'numeric':>9s} {'exact':>9s} {'rel err':>8s} {'residual':>9s}")
for spec in specs:
    A = materialize(spec, resolution_for(spec, 512))
    res = equilibrium_measure(A)
    exact = closed_form_capacity(spec)
    print(
        f"{str(spec):28s} {len(A):5d} {res.capacity:9.5f} {exact:9.5f} "
        f"{abs(res.capacity - exact) / exact:8.2%} {res.frostman_residual:9.1e}"
    )

# The Frostman residual is the spread of the equilibrium potential over the
# support.  It sits at round-off because every sample ends up carrying mass,
# so a single bordered linear solve gives the minimizer.

# ## The equilibrium measure of a segment
#
# On `[0, 1]` the equilibrium density is the arcsine law
# `1 / (pi sqrt(x (1 - x)))`.  The discrete weights divided by the panel
# lengths should follow it away from the endpoints.

A = materialize(Segment(0, 1), 1 / 400)
res = equilibrium_measure(A)
x = A.points.real
density = res.measure.weights / A.panel_lengths
arcsine = 1 / (np.pi * np.sqrt(x[1:-1] * (1 - x[1:-1])))
for k in (10, 50, 100, 200, 300, 390):
    print(f"x = {x[k]:.4f}   discrete {density[k]:8.4f}   arcsine {arcsine[k - 1]:8.4f}")

# ## An oracle that shares nothing with the solver
#
# The Leja estimate picks points greedily and takes a geometric mean of
# distances.  It converges slowly and from above, and it needs a candidate
# set several times denser than the number of picks.

for N in (64, 256, 1024):
    est = capacity_leja(materialize(Segment(0, 1), 1 / (8 * N)), N)
    print(f"segment, N = {N:5d}: Leja {est:.5f}")
