from __future__ import annotations

import json
import math

import numpy as np
import pytest

from horocorr.catalog import (get_entry, list_entries, make_constant, make_cylindric,
                              make_flat_punctured, make_horosphere_reference)
from horocorr.conformal import p_tensor
from horocorr.correspondence import gauss_injectivity_probe, hypersurface_to_metric
from horocorr.curvature import fd_principal_curvatures
from horocorr.lorentz import mink_inner
from horocorr.sphere import north_pole


def at_angle(theta, phi=0.0):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def test_constant_entry():
    e = make_constant(0.7)
    assert e.expected["p_round_eigenvalue"] == 0.5
    assert e.expected["beta"] == pytest.approx(math.exp(1.4))
    assert e.id == "constant:0.7"
    json.dumps(e.to_json())


def test_flat_antipode():
    e = make_flat_punctured()
    assert e.metric.rho.value(-north_pole(2)) == pytest.approx(math.log(0.5), abs=1e-15)


def test_flat_matches_chart_factor():
    # e^rho equals (1 + |u|^2)/2 in the stereographic chart from the puncture
    e = make_flat_punctured()
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = at_angle(rng.uniform(0.3, math.pi), rng.uniform(0, 2 * math.pi))
        u = x[:2] / (1 - x[2])
        assert math.exp(e.metric.rho.value(x)) == pytest.approx((1 + u @ u) / 2, rel=1e-12)


def test_cylindric_values():
    e = make_cylindric()
    assert e.metric.rho.value(at_angle(math.pi / 2)) == pytest.approx(0.0, abs=1e-15)
    for th in (0.1, 0.7, 1.5, 2.9):
        # girth: e^rho sin(theta) * 2 pi
        assert math.exp(e.metric.rho.value(at_angle(th))) * math.sin(th) * 2 * math.pi == pytest.approx(
            2 * math.pi, rel=1e-12)
    a = p_tensor(e.metric, at_angle(1.0)).eigenvalues
    b = p_tensor(e.metric, at_angle(2.1416)).eigenvalues
    assert np.max(np.abs(a - b)) < 1e-9


def test_cylindric_girth_by_quadrature():
    e = make_cylindric()
    ph = np.linspace(0, 2 * math.pi, 2001)
    for th in (0.3, 1.2):
        pts = np.stack([at_angle(th, f) for f in ph])
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        mid = 0.5 * (pts[1:] + pts[:-1])
        mid /= np.linalg.norm(mid, axis=1)[:, None]
        L = np.sum(np.exp(e.metric.rho.value(mid)) * seg)
        assert L == pytest.approx(2 * math.pi, rel=1e-5)


def test_cylindric_needs_antipodes():
    with pytest.raises(ValueError):
        make_cylindric(north_pole(2), np.array([1.0, 0, 0]))


def test_horosphere_reference():
    p = np.array([0.0, 0.6, 0.8])
    for s in (0.0, 0.5, -1.0):
        m = make_horosphere_reference(p, s, resolution=33)
        o = m.owned
        lp = np.concatenate([[1.0], p])
        h = mink_inner(m.phi[o], lp)
        assert np.ptp(h) < 1e-12 * max(1, abs(h).max())
        assert max(m.invariant_errors().values()) < 1e-12
        G, sup = hypersurface_to_metric(m)
        assert np.allclose(G[o], p, atol=1e-12)
        assert np.allclose(sup[o], s, atol=1e-12)
        assert gauss_injectivity_probe(m).verdict == "Collision"


def test_horosphere_reference_curvature():
    # unit principal curvatures; the constant light-cone vector fixes the orientation
    m = make_horosphere_reference(resolution=33)
    K = fd_principal_curvatures(m)
    ok = np.all(np.isfinite(K), axis=1)
    assert ok.sum() > 100
    assert np.max(np.abs(np.abs(K[ok]) - 1)) < 1e-3


def test_get_entry():
    assert get_entry("constant:1.5").metric.rho.value(north_pole(2)) == 1.5
    assert get_entry("constant").id == "constant:0"
    assert get_entry("cylindric", n=3).metric.dim == 3
    with pytest.raises(KeyError):
        get_entry("nope")
    with pytest.raises(KeyError):
        get_entry("constant:abc")
    assert "cylindric" in list_entries()
