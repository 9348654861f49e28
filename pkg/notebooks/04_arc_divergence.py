# ---
# jupyter:
#   jupytext:
#     text_representation:
#       format_name: light
# ---

# # Arcs that fill the circle without their capacity converging
#
# Take `n` equal arcs on the unit circle with total half-length `L_n`.  As
# `n` grows the gaps shrink and the sets converge to the circle in Hausdorff
# distance.  Their capacity is `sin(L_n / 2)^(1/n)`, which tends to
# `cp(T) = 1` only when `log(1/L_n) = o(n)`.  With `L_n = exp(-n)` it tends
# to `1/e` instead, so Hausdorff convergence plus uniform perfectness is not
# enough on its own.  The product `d_H log(1/alpha)` stays bounded, which is
# why a condition coupling the two is needed.

import math

from logcap.experiments import ExpDecay, Reciprocal, arc_convergence, rows_to_csv

rows = arc_convergence(ExpDecay(), 10)
print(f"{'n':>3s} {'d_H':>8s} {'alpha':>10s} {'d_H log(1/alpha)':>17s} {'cap':>8s} {'exact':>8s} {'sup(g_n - g)':>13s}")
for r in rows:
    print(
        f"{r.n:3d} {r.d_h:8.4f} {r.alpha:10.3e} {r.d_h * math.log(1 / r.alpha):17.3f} "
        f"{r.cap_numeric:8.5f} {r.cap_closed:8.5f} {r.green_sup_dev:13.4f}"
    )
print("limit of the capacities: 1/e =", round(math.exp(-1), 5))

# The Green's functions do not converge either: at the gap midpoints the
# limit is 0 on the circle, while `g_n` stays near `log(1/cp(E_n))`.
#
# With `L_n = 1/n` the closed form climbs to 1 and the deviation decays.

rows = arc_convergence(Reciprocal(), 16)
for r in rows[::3]:
    print(f"n = {r.n:2d}: cap {r.cap_numeric:.4f} (exact {r.cap_closed:.4f}), sup dev {r.green_sup_dev:.4f}")

rows = arc_convergence(Reciprocal(), 1024, numeric_max_n=0)
print("closed form at n = 1024:", round(rows[-1].cap_closed, 5))

# The same table, as written by the command line tool:

print(rows_to_csv(arc_convergence(ExpDecay(), 3)))
