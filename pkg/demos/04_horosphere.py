"""The flat metric on the punctured sphere gives a horosphere."""
from __future__ import annotations

import numpy as np

from horocorr.catalog import make_flat_punctured
from horocorr.correspondence import curvature_report, hypersurface_to_metric, metric_to_hypersurface
from horocorr.lorentz import mink_inner
from horocorr.sphere import north_pole

e = make_flat_punctured()
mesh = metric_to_hypersurface(e.metric, 0.0, e.grid())
lp = np.concatenate([[1.0], north_pole(2)])
h = mink_inner(mesh.phi[mesh.owned], lp)
print("<phi, (1,p)> spread over nodes:", np.ptp(h))

rep = curvature_report(mesh)
print("kappa range:", rep.to_json()["kappa_min"], rep.to_json()["kappa_max"])
print("dictionary gap:", rep.max_dictionary_gap)

# Gauss map and support function come back from phi and eta alone.
G, s = hypersurface_to_metric(mesh)
o = mesh.owned
print("support - rho:", np.abs(s[o] - e.metric.rho.value(mesh.grid.points[o])).max())
