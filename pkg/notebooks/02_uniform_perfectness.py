# ---
# jupyter:
#   jupytext:
#     text_representation:
#       format_name: light
# ---

# # How uniformly perfect is a sampled set?
#
# A compact set `E` is `alpha`-uniformly perfect when every annulus
# `alpha r <= |z - a| <= r` centred on `E` with `r <= diam E` meets `E`.
# On a sample we can only bracket the constant: an empty annulus found on the
# grid of centres and radii gives an upper bound, and the grid step plus the
# sampling resolution give a lower one.

import math

from logcap import (
    ArcFamily,
    CantorStage,
    PointCloud,
    Segment,
    arc_alpha_lower,
    cantor_alpha,
    estimate_alpha,
    materialize,
)

# For `[0, 1]` the worst annulus is centred at 1/2 with radius 1, which
# gives exactly 1/2.

est = estimate_alpha(materialize(Segment(0, 1), 0.01))
print(est)

# Two points are barely uniformly perfect: the annulus between them is huge.

print(estimate_alpha(materialize(PointCloud((0, 1)), 0.01)))

# Arc families have an explicit lower bound from their gap geometry, and the
# estimator never reports an upper bound below it.

for n, L in [(1, 1.0), (4, 1.0), (8, 1.0), (8, 2.5)]:
    e = estimate_alpha(materialize(ArcFamily(n, L), 0.01))
    print(f"ArcFamily({n}, {L}): bracket [{e.alpha_lower:.3f}, {e.alpha_upper:.3f}], bound {arc_alpha_lower(n, L):.3f}")

# Cantor stages with removed fractions `eps_k` are `min(eps_k)/2`-uniformly
# perfect.  For middle thirds that is 1/6.

e = estimate_alpha(materialize(CantorStage((1 / 3,) * 6, 6), 2.0**-11))
print(f"Cantor depth 6: bracket [{e.alpha_lower:.3f}, {e.alpha_upper:.3f}], certified {cantor_alpha([1 / 3] * 6, 6):.4f}")

# The bracket is similarity invariant up to the grid step, since both the
# sets and the annuli scale together.

A = materialize(ArcFamily(4, 1.0), 0.01)
for scale in (0.1, 1.0, 10.0):
    e = estimate_alpha(A.transformed(scale, 2 - 1j, 0.4))
    print(f"scale {scale:5.1f}: [{e.alpha_lower:.3f}, {e.alpha_upper:.3f}]")
