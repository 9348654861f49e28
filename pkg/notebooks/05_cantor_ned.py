# ---
# jupyter:
#   jupytext:
#     text_representation:
#       format_name: light
# ---

# # Cantor sets that are negligible for extremal distance
#
# Remove the middle `eps_n` fraction of every component at stage `n`.  The
# removed pieces, closed up, form `E_n`, which increases to the complement of
# the Cantor set `K` inside `[0, 1]`.  `K` is NED exactly when
# `cp(E_n) -> cp([0, 1]) = 1/4`, and a sufficient condition is
# `log(1/eps_n) <= C n / log n` with `C < 1/(24 log 2)`.

import math

from logcap import CantorStage, Segment, hausdorff_distance, materialize
from logcap.experiments import cantor_condition, cantor_convergence

report = cantor_convergence([1 / 3], 8, 2.0**-12)
print(f"{'n':>2s} {'d_H':>9s} {'2^-(n+1)':>9s} {'cap':>9s} {'sup(g_n - g)':>13s}")
for r in report.rows:
    print(f"{r.n:2d} {r.d_h:9.5f} {r.d_h_bound:9.5f} {r.cap_numeric:9.5f} {r.green_sup_dev:13.4f}")
print("verdict:", report.verdict)

# The capacities increase to 1/4 and the Green's functions converge on the
# fixed grid.
#
# The distance column tells a different story at `n = 1`.  The end
# components `[0, 3^-n]` and `[1 - 3^-n, 1]` of the stage set have only one
# removed neighbour, so a point of `[0, 1]` next to 0 or 1 is `3^-n` away
# from `E_n`.  At `n = 1` that is 1/3, above the bound 1/4.  For
# `n >= 2` the bound holds, and `2^-n` is a bound for every `n` and every
# choice of fractions.

for n in (1, 2, 3):
    A = materialize(CantorStage((1 / 3,) * n, n), 2.0**-12)
    d = hausdorff_distance(A, materialize(Segment(0, 1), 2.0**-12))
    print(f"n = {n}: d_H = {d:.5f}, 3^-n = {3.0 ** -n:.5f}, 2^-(n+1) = {2.0 ** (-n - 1):.5f}")

# The sufficient condition is asymptotic.  For middle thirds and `C = 0.06`
# it first holds at a depth far beyond what we solve.

first = next(n for n in range(2, 1000) if cantor_condition(1 / 3, n, 0.06))
print("condition first holds at n =", first, "; 1/(24 log 2) =", round(1 / (24 * math.log(2)), 6))
