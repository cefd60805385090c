"""The tensor P of a conformal factor and its eigenvalues."""
from __future__ import annotations

import numpy as np

from horocorr.catalog import make_constant, make_cylindric, make_flat_punctured
from horocorr.conformal import p_tensor, realizability_scan
from horocorr.sphere import normalize

rng = np.random.default_rng(0)
x = normalize(rng.normal(size=(5, 3)))
x = x[np.abs(x[:, 2]) < 0.9]      # keep away from the punctures at the poles

# rho = c: the round components stay 1/2 Id, relative eigenvalues scale by e^{-2c}.
for c in (0.0, 1.0):
    s = p_tensor(make_constant(c).metric, x)
    print(f"c={c}: round", s.round_eigenvalues[0], " relative", s.eigenvalues[0])

# The flat metric on the punctured sphere has P = 0.
print("flat: max |P| =", np.abs(p_tensor(make_flat_punctured().metric, x).matrix).max())

# The cylinder: -1/2 along meridians, +1/2 along parallels.
print("cylinder:", p_tensor(make_cylindric().metric, x).eigenvalues)

# Scan a grid against a bound.
e = make_cylindric()
rep = realizability_scan(e.metric, e.grid((64, 32)), 0.5)
print(rep.verdict, rep.min_lambda, rep.max_lambda)
