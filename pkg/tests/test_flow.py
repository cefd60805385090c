from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horocorr.catalog import make_constant, make_cylindric, make_flat_punctured
from horocorr.correspondence import metric_to_hypersurface
from horocorr.domains import DomainSpec, build_grid
from horocorr.errors import MathDomainError, ModelError
from horocorr.flow import (find_embedding_time, flow_invariance_check, normal_flow,
                           riccati_curvature, rotational_symmetry_error)
from horocorr.lorentz import mink_inner
from horocorr.sphere import north_pole


@pytest.fixture(scope="module")
def sphere1():
    g = build_grid(DomainSpec.full_sphere(2), 32)
    return metric_to_hypersurface(make_constant(0.0).metric, 1.0, g, curvatures=True)


def test_zero_flow_is_identity(sphere1):
    f = normal_flow(sphere1, 0.0).mesh
    o = sphere1.owned
    assert np.array_equal(f.phi[o], sphere1.phi[o])
    assert np.array_equal(f.eta[o], sphere1.eta[o])


def test_semigroup_and_direct_build(sphere1):
    g = sphere1.grid
    a = normal_flow(normal_flow(sphere1, 0.7).mesh, 1.1).mesh
    b = normal_flow(sphere1, 1.8).mesh
    c = metric_to_hypersurface(make_constant(0.0).metric, 2.8, g)
    o = sphere1.owned
    assert np.max(np.abs(a.phi[o] - b.phi[o]) / np.abs(b.phi[o]).max()) < 1e-9
    assert np.max(np.abs(b.phi[o] - c.phi[o]) / np.abs(c.phi[o]).max()) < 1e-9


def test_sphere_flow_curvature(sphere1):
    r = normal_flow(sphere1, 1.0, fd=True)
    o = sphere1.owned
    assert np.max(np.abs(r.fd_kappas[o] - 1 / math.tanh(2))) < 1e-3
    assert riccati_curvature(1 / math.tanh(1), 1.0) == pytest.approx(1 / math.tanh(2), rel=1e-14)
    assert np.allclose(r.riccati_kappas[o], 1 / math.tanh(2), atol=1e-3)


@pytest.mark.parametrize("t", [0.5, 2.0, 4.0])
def test_flat_stays_horosphere(t):
    e = make_flat_punctured()
    m = metric_to_hypersurface(e.metric, 0.0, e.grid())
    r = normal_flow(m, t, fd=True)
    lp = np.concatenate([[1.0], north_pole(2)])
    h = mink_inner(r.mesh.phi[m.owned], lp)
    assert np.ptp(h) < 1e-9 * max(1.0, abs(h).max())
    K = r.fd_kappas[np.all(np.isfinite(r.fd_kappas), axis=1)]
    assert np.max(np.abs(K - 1)) < 1e-3


def test_riccati_examples():
    for t in (0.0, 0.5, 3.0):
        assert riccati_curvature(1.0, t) == 1.0
        assert riccati_curvature(-1.0, t) == -1.0
    assert riccati_curvature(0.0, 1.0) == pytest.approx(math.tanh(1))
    for k in (0.0, 5.0):
        assert abs(riccati_curvature(k, 10.0) - 1) < 1e-8
    # kappa^t - 1 = (kappa - 1)(1 - tanh t)/(1 + kappa tanh t): about 7.8e-8 for kappa = -0.9
    th = math.tanh(10.0)
    exact = 1.9 * (1 - th) / (1 - 0.9 * th)
    assert 1 - riccati_curvature(-0.9, 10.0) == pytest.approx(exact, rel=1e-6)
    assert abs(riccati_curvature(-0.9, 12.0) - 1) < 1e-8
    with pytest.raises(MathDomainError):
        riccati_curvature(-1 / math.tanh(1.0), 1.0)


@given(st.floats(-0.999, 100), st.floats(-0.999, 100), st.floats(0, 5))
def test_riccati_properties(a, b, t):
    ra, rb = riccati_curvature(a, t), riccati_curvature(b, t)
    assert ra > -1 - 1e-12
    if a < b:
        assert ra <= rb + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 5))
def test_flow_preserves_invariants(t):
    e = make_cylindric()
    m = metric_to_hypersurface(e.metric, 1.0, e.grid((32, 16)))
    f = normal_flow(m, t).mesh
    err = f.invariant_errors()
    scale = math.exp(abs(t))
    assert err["phi_phi"] < 1e-9 * scale**2
    assert err["eta_eta"] < 1e-9 * scale**2
    assert err["phi_eta"] < 1e-9 * scale**2
    assert err["psi_split"] < 1e-12


def test_flow_rejects_broken_mesh(sphere1):
    from dataclasses import replace
    bad = replace(sphere1, phi=sphere1.phi * 2)
    with pytest.raises(ModelError):
        normal_flow(bad, 1.0)


def test_invariance_report():
    e = make_cylindric()
    m = metric_to_hypersurface(e.metric, 1.0, e.grid((64, 32)), curvatures=True)
    r = flow_invariance_check(m, normal_flow(m, 1.0, fd=True))
    assert r.passed, r.to_json()


def test_find_embedding_time():
    e = make_flat_punctured()
    s = find_embedding_time(e.metric, e.grid((32, 32)), [0, 1, 2])
    assert s.first_embedded_t == 0.0 and s.monotone
    c = make_cylindric()
    s = find_embedding_time(c.metric, c.grid((64, 32)), [1, 2, 3])
    assert s.found and s.monotone
    assert s.to_json()["verdict"] == "Embedded"
    with pytest.raises(ValueError):
        find_embedding_time(e.metric, e.grid((8, 8)), [])
    with pytest.raises(ValueError):
        find_embedding_time(e.metric, e.grid((8, 8)), [1, 0])


def test_rotational_symmetry():
    c = make_cylindric()
    m = metric_to_hypersurface(c.metric, 3.0, c.grid((64, 32)))
    assert rotational_symmetry_error(m, north_pole(2)) < 1e-9
