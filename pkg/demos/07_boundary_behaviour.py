"""Behaviour of beta and conformal length near the boundary, and the ODE constants."""
from __future__ import annotations

import math

import numpy as np

from horocorr.catalog import make_cylindric, make_flat_punctured
from horocorr.conformal import (boundary_divergence_scan, completeness_probe,
                                gradient_bound_constants, ode_comparison_solution)
from horocorr.sphere import north_pole

p = north_pole(2)
q = np.array([1.0, 0.0, 0.0])
th = 0.5 ** np.arange(1, 21)
meridian = np.cos(th)[:, None] * p + np.sin(th)[:, None] * q

for make in (make_flat_punctured, make_cylindric):
    m = make(margin=0.0).metric
    scan = boundary_divergence_scan(m, p, meridian)
    print(m.label, scan.verdict, f"last beta {scan.values[-1]:.3g}")

th = np.geomspace(1.0, 1e-3, 300)
curve = np.cos(th)[:, None] * p + np.sin(th)[:, None] * q
print("cylinder length toward the puncture:", completeness_probe(make_cylindric(margin=0.0).metric, curve)[-1],
      " |log 1e-3| =", abs(math.log(1e-3)))

for C, C0 in ((1, 1), (2, 1), (1, 5)):
    k = gradient_bound_constants(C, C0, 2)
    print(f"C={C} C0={C0}: A={k.A:.6g} delta={k.delta:.6g} Ybar={k.Ybar:.6g} residual={k.residual():.2e}")
print("Y(pi/4) for A=1, y0=0:", ode_comparison_solution(1.0, 0.0, math.pi / 4))
