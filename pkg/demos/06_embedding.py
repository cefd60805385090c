"""Self-intersection checks: a flowed cylinder and a figure-eight ribbon."""
from __future__ import annotations

import time

from horocorr.catalog import make_cylindric, make_selfintersecting_fixture
from horocorr.correspondence import metric_to_hypersurface
from horocorr.flow import find_embedding_time, rotational_symmetry_error
from horocorr.intersect import embeddedness_check
from horocorr.sphere import north_pole

e = make_cylindric()
grid = e.grid((128, 64))
search = find_embedding_time(e.metric, grid, [0.5, 1, 2, 3])
for t, v in search.table:
    print(f"t={t}: {v.verdict} ({v.pairs_tested} candidate pairs)")
print("first embedded t:", search.first_embedded_t, " monotone:", search.monotone)

mesh = metric_to_hypersurface(e.metric, 3.0, grid)
print("rotation mismatch:", rotational_symmetry_error(mesh, north_pole(2)))

f = make_selfintersecting_fixture()
for threads in (1, 4):
    t0 = time.perf_counter()
    v = embeddedness_check(f.vertices, f.triangles, threads=threads)
    print(threads, "thread(s):", v.verdict, v.witness,
          f"distance to crossing {f.distance_to_crossing(v.point):.1e}",
          f"{time.perf_counter() - t0:.3f} s")
g = f.without_crossing()
print("without the crossing:", embeddedness_check(g.vertices, g.triangles).verdict)
