from __future__ import annotations

import math

import numpy as np
import pytest

from horocorr.errors import DomainError
from horocorr.sphere import (ScalarFieldOnSphere, constant_field, linear_field, normalize,
                             north_pole, sph_gradient, sph_hessian, sphere_geodesic, spherical_distance,
                             stereographic_chart, tangent_frame)


@pytest.fixture
def pts():
    rng = np.random.default_rng(3)
    return normalize(rng.normal(size=(40, 3)))


def test_frame_orthonormal(pts):
    F = tangent_frame(pts)
    assert np.allclose(np.einsum("kai,kaj->kij", F, F), np.eye(2), atol=1e-14)
    assert np.allclose(np.einsum("ka,kai->ki", pts, F), 0, atol=1e-14)


def test_distance():
    a, b = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert spherical_distance(a, b) == pytest.approx(math.pi / 2)
    assert spherical_distance(a, -a) == pytest.approx(math.pi)
    assert spherical_distance(a, a) == 0


def test_chart_round_trip_and_factor(pts):
    ch = stereographic_chart(north_pole(2))
    u = ch.forward(pts)
    assert np.allclose(ch.inverse(u), pts, atol=1e-13)
    J = ch.jacobian(u)
    G = np.einsum("kai,kaj->kij", J, J)
    c = ch.conformal_factor(u)
    assert np.allclose(G, (c**2)[:, None, None] * np.eye(2), atol=1e-12)
    assert np.allclose(ch.forward(-north_pole(2)), 0)
    with pytest.raises(DomainError):
        ch.forward(north_pole(2))


def test_linear_field_derivatives(pts):
    # f = x.e: grad f = e - (x.e) x, Hess f = -(x.e) Id
    e = np.array([0.3, -0.5, 0.8])
    f = linear_field(e)
    assert np.allclose(f.gradient(pts), e - (pts @ e)[:, None] * pts, atol=1e-14)
    H = f.hessian(pts)
    assert np.allclose(H, -(pts @ e)[:, None, None] * np.eye(2), atol=1e-14)
    fd = f.as_finite_difference()
    assert np.allclose(fd.gradient(pts), f.gradient(pts), atol=1e-8)
    assert np.allclose(fd.hessian(pts), H, atol=1e-5)


def test_fd_hessian_chart_independent(pts):
    f = lambda x: np.sin(2 * x[..., 0]) + x[..., 1] * x[..., 2]  # noqa: E731
    near_equator = pts[np.abs(pts[:, 2]) < 0.6]
    H1 = sph_hessian(f, near_equator, 5e-4, pole=north_pole(2))
    H2 = sph_hessian(f, near_equator, 5e-4, pole=-north_pole(2))
    assert np.max(np.abs(H1 - H2)) < 1e-5
    g1 = sph_gradient(f, near_equator, pole=north_pole(2))
    g2 = sph_gradient(f, near_equator, pole=-north_pole(2))
    assert np.max(np.abs(g1 - g2)) < 1e-7


def test_constant_field(pts):
    f = constant_field(2.5)
    assert np.all(f(pts) == 2.5)
    assert np.all(f.gradient(pts) == 0)
    assert np.all(f.hessian(pts) == 0)


def test_field_validation():
    with pytest.raises(ValueError):
        ScalarFieldOnSphere(lambda x: x[..., 0])
    with pytest.raises(ValueError):
        sph_gradient(lambda x: x[..., 0], north_pole(2), step=0)


def test_chart_reference_points():
    ch = stereographic_chart(north_pole(2))
    assert ch.conformal_factor(np.zeros(2)) == pytest.approx(2.0)
    eq = np.array([[math.cos(a), math.sin(a), 0.0] for a in np.linspace(0, 6, 13)])
    assert np.allclose(np.linalg.norm(ch.forward(eq), axis=1), 1.0)


def test_gradient_of_height_at_equator():
    e = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    g = sph_gradient(lambda y: y[..., 2], x)
    assert np.allclose(g, e, atol=1e-8)
    assert np.allclose(sph_gradient(lambda y: 0 * y[..., 0] + 3.0, x), 0)
    assert np.allclose(sph_hessian(lambda y: 0 * y[..., 0] + 3.0, x, 1e-3), 0)


def test_geodesic():
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert np.allclose(sphere_geodesic(e1, e2, 0.0), e1)
    assert np.allclose(sphere_geodesic(e1, e2, math.pi / 2), e2, atol=1e-15)
    assert np.allclose(sphere_geodesic(e1, e2, math.pi), -e1, atol=1e-15)
