# ---
# jupyter:
#   jupytext:
#     text_representation:
#       format_name: light
# ---

# # Green's function and the bounds uniform perfectness buys
#
# With pole at infinity, `g_E(z) = V - U(z)` where `U` is the equilibrium
# potential.  Uniform perfectness with constant `alpha` forces two
# quantitative facts: a Hölder bound `g_E(z) <= M (|z - a| / diam E)^beta`
# near every `a` in `E`, and a capacity lower bound
# `cp(E ∩ closed disk(a, r)) >= alpha^2 r / 32`.

import math

import numpy as np

from logcap import ArcFamily, CantorStage, FullCircle, equilibrium_measure, materialize
from logcap.green import check_holder, check_pommerenke, green_eval, holder_constants

# For the unit circle `g(z) = log|z|` outside.

A = materialize(FullCircle(), 2 * math.pi / 512)
res = equilibrium_measure(A)
for r in (1.5, 3.0, 1e3):
    print(f"|z| = {r:7g}: g = {green_eval(res, r):.6f}, log|z| = {math.log(r):.6f}")

# The Hölder constants are tiny in the exponent: at `alpha = 1/6` the
# bound grows like the 0.011th power of the distance.

for alpha in (0.5, 1 / 6, 0.01):
    hc = holder_constants(alpha)
    print(f"alpha = {alpha:.4f}: M = {hc.M:.4f}, beta = {hc.beta:.5f}")

# Check the Hölder bound on a Cantor stage, centred at its leftmost point.
# Probes are spread over the disk of radius `diam E`.

C = materialize(CantorStage((1 / 3,) * 6, 6), 2.0**-10)
resC = equilibrium_measure(C)
a = complex(C.points[np.argmin(C.points.real)])
rng = np.random.default_rng(0)
probes = a + C.diam * np.sqrt(rng.random(300)) * np.exp(2j * np.pi * rng.random(300))
rep = check_holder(resC, C, 1 / 6, a, probes)
print(f"Hölder: {rep.n_violations} violations in {rep.n_samples} probes, worst margin {rep.worst_margin:.3f}")

# The margin is large: the constants are far from sharp here.
# The capacity bound is tighter, so it is the more informative check.

centers = C.points[rng.integers(len(C), size=30)]
radii = C.diam * (1 - rng.random(30))
rep = check_pommerenke(C, 1 / 6, list(zip(centers, radii)))
print(f"Pommerenke: {rep.n_violations} violations in {rep.n_samples} trials, worst margin {rep.worst_margin:.2e}")

# Arc families work the same way, with the alpha from their gap geometry.

from logcap import arc_alpha_lower

arcs = materialize(ArcFamily(8, 1.0), 0.005)
resA = equilibrium_measure(arcs)
a = complex(arcs.points[0])
probes = a + arcs.diam * np.sqrt(rng.random(300)) * np.exp(2j * np.pi * rng.random(300))
rep = check_holder(resA, arcs, arc_alpha_lower(8, 1.0), a, probes)
print(f"arcs: {rep.n_violations} violations in {rep.n_samples} probes")
