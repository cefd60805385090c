"""Points, vectors and distances in the hyperboloid model."""
from __future__ import annotations

import math

import numpy as np

from horocorr.lorentz import (classify, from_poincare_ball, hyperbolic_distance, mink_inner, origin,
                              to_poincare_ball)

# The base point of the hyperboloid and a point boosted one unit along x.
O = origin(2)
p = np.array([math.cosh(1), math.sinh(1), 0, 0])
print("<O,O> =", mink_inner(O, O))
print("<p,p> =", mink_inner(p, p))
print("d(O, p) =", hyperbolic_distance(O, p))

# Timelike, spacelike and null vectors.
for v in ([1, 0, 0, 0], [0, 1, 0, 0], [2, 2, 0, 0], [-1, 0, 0, 0]):
    print(v, "->", classify(v, 1e-12).value)

# Ball coordinates: distance t from the center maps to radius tanh(t/2).
b = to_poincare_ball(p)
print("ball(p) =", b, " tanh(1/2) =", math.tanh(0.5))
print("round trip error:", np.abs(from_poincare_ball(b) - p).max())
