from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horocorr.catalog import make_constant, make_cylindric, make_flat_punctured
from horocorr.conformal import (ConformalMetric, beta, boundary_divergence_scan,
                                completeness_probe, gradient_bound_constants, ode_blowup_time,
                                ode_comparison_solution, p_eigenvalues_rescaled, p_tensor,
                                realizability_scan)
from horocorr.domains import DomainSpec, build_grid
from horocorr.errors import DomainError, MathDomainError
from horocorr.sphere import linear_field, normalize, north_pole, spherical_distance, tangent_frame


def random_points(k, seed=0, away_from=None, dist=0.0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < k:
        x = normalize(rng.normal(size=3))
        if away_from is None or all(spherical_distance(x, a) > dist for a in away_from):
            out.append(x)
    return np.array(out)


def test_p_constant_zero():
    m = make_constant(0.0).metric
    s = p_tensor(m, random_points(10))
    assert np.allclose(s.matrix, 0.5 * np.eye(2), atol=1e-15)
    assert np.allclose(s.eigenvalues, 0.5, atol=1e-15)


@pytest.mark.parametrize("c", [-1.0, 0.3, 2.0])
def test_p_constant_c(c):
    s = p_tensor(make_constant(c).metric, random_points(5))
    assert np.allclose(s.round_eigenvalues, 0.5, atol=1e-15)
    # relative to e^{2c} times the round metric
    assert np.allclose(s.eigenvalues, 0.5 * math.exp(-2 * c), atol=1e-15)


def test_p_flat_vanishes_analytic():
    e = make_flat_punctured()
    p = north_pole(2)
    x = random_points(500, 1, [p], 0.2)
    assert np.max(np.abs(p_tensor(e.metric, x).matrix)) < 1e-9


@pytest.mark.parametrize("make", [make_flat_punctured, make_cylindric])
def test_analytic_derivatives_match_fd(make):
    e = make()
    p = north_pole(2)
    x = random_points(20, 2, [p, -p], 0.3)
    rho = e.metric.rho
    fd = rho.as_finite_difference(hess_step=1e-4)
    assert np.max(np.abs(rho.gradient(x) - fd.gradient(x))) < 1e-6
    assert np.max(np.abs(rho.hessian(x) - fd.hessian(x))) < 1e-6


def test_p_flat_fd_oracle():
    e = make_flat_punctured()
    x = random_points(20, 3, [north_pole(2)], 0.3)
    fdm = ConformalMetric(e.metric.domain, e.metric.rho.as_finite_difference(), "fd")
    assert np.max(np.abs(p_tensor(fdm, x).matrix)) < 1e-3


def test_p_eigenvalues_frame_independent():
    e = make_cylindric()
    x = random_points(30, 4, [north_pole(2), -north_pole(2)], 0.2)
    F = tangent_frame(x)
    c, s = math.cos(0.7), math.sin(0.7)
    G = np.stack([c * F[:, :, 0] + s * F[:, :, 1], -s * F[:, :, 0] + c * F[:, :, 1]], axis=2)
    a = p_tensor(e.metric, x, F).eigenvalues
    b = p_tensor(e.metric, x, G).eigenvalues
    assert np.allclose(a, b, atol=1e-12)


def test_cylindric_eigenvalues():
    e = make_cylindric()
    x = random_points(30, 5, [north_pole(2), -north_pole(2)], 0.2)
    assert np.allclose(p_tensor(e.metric, x).eigenvalues, [-0.5, 0.5], atol=1e-9)


def test_outside_domain():
    e = make_flat_punctured()
    with pytest.raises(DomainError):
        p_tensor(e.metric, north_pole(2))


def test_rescaled():
    m = make_constant(0.0).metric
    x = random_points(3)
    assert np.allclose(p_eigenvalues_rescaled(m, x, 0.0), p_tensor(m, x).eigenvalues)
    assert np.allclose(p_eigenvalues_rescaled(m, x, 1.0), math.exp(-2) / 2)
    f = make_flat_punctured().metric
    assert np.max(np.abs(p_eigenvalues_rescaled(f, -north_pole(2), 3.0))) < 1e-12


def test_beta_examples():
    x = random_points(4)
    assert np.allclose(beta(make_constant(0.0).metric, x), 1)
    assert np.allclose(beta(make_constant(0.4).metric, x), math.exp(0.8))
    f = make_flat_punctured().metric
    th = np.linspace(2.5, 0.01, 60)
    mer = np.stack([np.sin(th), np.zeros_like(th), np.cos(th)], axis=1)
    assert np.all(np.diff(beta(f, mer)) > 0)


def test_realizability():
    r = realizability_scan(make_constant(0.0).metric, build_grid(DomainSpec.full_sphere(2), 8), 1.0)
    assert r.verdict == "WithinBound" and r.min_lambda == pytest.approx(0.5) and r.max_lambda == pytest.approx(0.5)
    e = make_flat_punctured()
    assert realizability_scan(e.metric, e.grid((32, 32)), 0.01).verdict == "WithinBound"
    m = ConformalMetric(DomainSpec.full_sphere(2), linear_field([0, 0, 1.0], 5.0), "linear")
    r = realizability_scan(m, build_grid(m.domain, 16), 0.5)
    assert r.verdict == "Exceeds" and r.witness is not None
    r = realizability_scan(make_constant(0.0).metric, random_points(5), 0.5)
    assert r.verdict == "WithinBound" and r.at_bound


def test_one_sided_scan():
    e = make_cylindric()
    x = random_points(20, 6, [north_pole(2), -north_pole(2)], 0.2)
    assert realizability_scan(e.metric, x, 0.5, two_sided=False).verdict == "WithinBound"
    assert realizability_scan(e.metric, x, 0.4, two_sided=True).verdict == "Exceeds"


def _meridian(p, thetas):
    # points at polar angle theta from p in the plane of p and e_x
    q = np.array([1.0, 0.0, 0.0])
    return np.cos(thetas)[:, None] * p + np.sin(thetas)[:, None] * q


def test_divergence_scans():
    p = north_pole(2)
    f = make_flat_punctured(margin=0.0).metric
    seq = _meridian(p, 0.5 ** np.arange(1, 21))
    r = boundary_divergence_scan(f, p, seq)
    assert r.verdict == "Diverging" and r.values[-1] > 1e6
    c = make_cylindric(margin=0.0).metric
    for b in (p, -p):
        th = 0.5 ** np.arange(1, 21)
        seq = _meridian(p, th if b is p else math.pi - th)
        assert boundary_divergence_scan(c, b, seq).verdict == "Diverging"
    r = boundary_divergence_scan(make_constant(0.0).metric, p, seq)
    assert r.verdict == "Inconclusive" and r.note == "domain has no boundary"


def test_completeness_probe():
    m = make_constant(0.0).metric
    th = np.linspace(0, math.pi / 2, 100)
    curve = np.stack([np.cos(th), np.sin(th), 0 * th], axis=1)
    assert completeness_probe(m, curve)[-1] == pytest.approx(math.pi / 2, abs=1e-3)
    p = north_pole(2)
    # geometric approach with ratio 0.9 keeps steps below 0.1 rad
    th = 0.5 * 0.9 ** np.arange(0, 200)
    f = make_flat_punctured(margin=0.0).metric
    assert completeness_probe(f, _meridian(p, th))[-1] > 1e3
    c = make_cylindric(margin=0.0).metric
    th = np.geomspace(1.0, 1e-3, 200)
    assert completeness_probe(c, _meridian(p, th))[-1] > 5
    with pytest.raises(ValueError):
        completeness_probe(m, np.array([[1.0, 0, 0], [0, 1.0, 0]]))


def test_gradient_constants_examples():
    k = gradient_bound_constants(1.0, 1.0, 2)
    assert k.check(1e-9)
    assert k.C0 * k.C * math.exp(2 * k.K * k.delta * k.Ybar) + 1 <= k.A
    small = gradient_bound_constants(1e-6, 1.0, 2)
    assert small.delta == pytest.approx((math.pi / 4) / math.sqrt(small.A), rel=1e-5)
    assert small.check(1e-9)
    with pytest.raises(ValueError):
        gradient_bound_constants(0.0, 1.0, 2)
    assert gradient_bound_constants(1.0, 1.0, 9).K == 1.5


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 20), st.floats(1e-3, 20), st.integers(2, 5))
def test_gradient_constants_properties(C, C0, n):
    k = gradient_bound_constants(C, C0, n)
    assert k.check(1e-9)
    assert k.delta > 0 and k.Ybar > C
    # the bound is nearly tight: slightly smaller A is no longer admissible
    A2 = k.A * (1 - 1e-5)
    s = math.sqrt(A2)
    a = math.atan(C / s)
    d, y = (math.pi / 2 - a) / (2 * s), s * math.tan(math.pi / 4 + a / 2)
    assert C0 * C * math.exp(2 * k.K * d * y) + 1 > A2


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 5), st.floats(0.01, 5))
def test_gradient_constants_monotone_in_C(C, dC):
    a = gradient_bound_constants(C, 1.0, 2)
    b = gradient_bound_constants(C + dC, 1.0, 2)
    assert b.A >= a.A * (1 - 2e-6)


def test_ode_examples():
    assert ode_comparison_solution(2.0, 0.7, 0.0) == pytest.approx(0.7)
    assert ode_comparison_solution(1.0, 0.0, math.pi / 4) == pytest.approx(1.0)
    T = ode_blowup_time(1.0, 0.0)
    assert T == pytest.approx(math.pi / 2)
    with pytest.raises(MathDomainError):
        ode_comparison_solution(1.0, 0.0, T)


@settings(max_examples=30)
@given(st.floats(0.1, 10), st.floats(-5, 5), st.floats(0.05, 0.95))
def test_ode_solves_equation(A, y0, frac):
    t = frac * ode_blowup_time(A, y0)
    h = 1e-6 * ode_blowup_time(A, y0)
    y = ode_comparison_solution(A, y0, t)
    dy = (ode_comparison_solution(A, y0, t + h) - ode_comparison_solution(A, y0, t - h)) / (2 * h)
    assert dy == pytest.approx(y * y + A, rel=1e-5)
    assert ode_comparison_solution(A, y0, t + h) > y
