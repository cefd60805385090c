from __future__ import annotations

import numpy as np
import pytest

from horocorr.catalog import make_constant, make_selfintersecting_fixture
from horocorr.correspondence import metric_to_hypersurface
from horocorr.domains import DomainSpec, build_grid
from horocorr.intersect import embeddedness_check, resolve_threads


def test_geodesic_sphere_embedded():
    g = build_grid(DomainSpec.full_sphere(2), 32)
    m = metric_to_hypersurface(make_constant(0.0).metric, 1.0, g)
    v = embeddedness_check(m)
    assert v.embedded and v.witness is None and v.pairs_tested > 0


def test_fixture_self_intersects():
    f = make_selfintersecting_fixture()
    v = embeddedness_check(f.vertices, f.triangles)
    assert v.verdict == "SelfIntersecting"
    assert f.distance_to_crossing(v.point) < 1e-6
    i, j = v.witness
    assert i < j
    # exactly one triangle of the pair belongs to the sheet that without_crossing removes
    assert (i in f.crossing_triangles) != (j in f.crossing_triangles)


def test_fixture_without_crossing():
    f = make_selfintersecting_fixture().without_crossing()
    assert embeddedness_check(f.vertices, f.triangles).embedded


@pytest.mark.parametrize("threads", [1, 2, 4, 8])
def test_thread_independence(threads):
    f = make_selfintersecting_fixture(segments=400)
    ref = embeddedness_check(f.vertices, f.triangles, threads=1)
    v = embeddedness_check(f.vertices, f.triangles, threads=threads)
    assert v.to_json() == ref.to_json()


def test_threads_from_env(monkeypatch):
    monkeypatch.setenv("HOROCORR_THREADS", "3")
    assert resolve_threads(None) == 3
    monkeypatch.delenv("HOROCORR_THREADS")
    assert resolve_threads(None) == 1
    with pytest.raises(ValueError):
        resolve_threads(0)


def test_two_triangles():
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0],
                  [0.2, 0.2, -0.5], [0.2, 0.2, 0.5], [0.9, 0.9, 0.0]], dtype=float)
    v = embeddedness_check(V, np.array([[0, 1, 2], [3, 4, 5]]))
    assert v.verdict == "SelfIntersecting" and v.witness == (0, 1)
    V2 = V.copy()
    V2[3:, 2] += 2.0
    assert embeddedness_check(V2, np.array([[0, 1, 2], [3, 4, 5]])).embedded


def test_shared_vertex_not_counted():
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    T = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    assert embeddedness_check(V, T).embedded


def test_coplanar_overlap():
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0],
                  [0.2, 0.2, 0], [1.2, 0.2, 0], [0.2, 1.2, 0]], dtype=float)
    v = embeddedness_check(V, np.array([[0, 1, 2], [3, 4, 5]]))
    assert v.verdict == "SelfIntersecting"


def test_degenerate_triangles_skipped():
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 2, 2]], dtype=float)
    T = np.array([[0, 1, 2], [3, 3, 3]])
    v = embeddedness_check(V, T)
    assert v.embedded and v.degenerate_skipped == 1


def test_needs_3d():
    with pytest.raises(ValueError):
        embeddedness_check(np.zeros((3, 4)), np.array([[0, 1, 2]]))
