from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from horocorr.errors import DimensionError, ModelError
from horocorr.lorentz import (Model, boost_axis_point, classify, from_poincare_ball,
                              hyperbolic_distance, mink_inner, on_hyperboloid, origin,
                              to_poincare_ball)

vec4 = arrays(np.float64, 4, elements=st.floats(-10, 10))


def test_inner_examples():
    assert mink_inner([1, 0, 0, 0], [1, 0, 0, 0]) == -1
    assert mink_inner([1, 1, 0, 0], [1, 1, 0, 0]) == 0
    assert mink_inner([1, 0, 0, 0], [0, 1, 0, 0]) == 0


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        mink_inner([1, 0, 0], [1, 0, 0, 0])


@given(vec4, vec4, vec4, st.floats(-3, 3))
def test_inner_bilinear_symmetric(u, v, w, a):
    assert math.isclose(mink_inner(u, v), mink_inner(v, u), abs_tol=1e-12)
    lhs = mink_inner(a * u + w, v)
    rhs = a * mink_inner(u, v) + mink_inner(w, v)
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-9)


def test_inner_matches_plain_formula():
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=(2, 50, 5))
    plain = -u[:, 0] * v[:, 0] + np.sum(u[:, 1:] * v[:, 1:], axis=1)
    assert np.allclose(mink_inner(u, v), plain, atol=1e-13)


def test_inner_compensated_cancellation():
    # (1e8+1)^2 is not representable; the exact value of <u,u> is -(2e8 + 1)
    u = np.array([1e8 + 1, 1e8, 0.0, 0.0])
    assert mink_inner(u, u) == -(2e8 + 1)


@pytest.mark.parametrize("v, model", [
    ([1, 0, 0, 0], Model.HYPERBOLOID),
    ([0, 1, 0, 0], Model.DE_SITTER),
    ([2, 2, 0, 0], Model.NULL_CONE_PLUS),
    ([-2, 2, 0, 0], Model.OTHER),
    ([-1, 0, 0, 0], Model.OTHER),
    ([0, 0, 0, 0], Model.OTHER),
])
def test_classify(v, model):
    assert classify(v, 1e-12) is model


def test_classify_needs_positive_tol():
    with pytest.raises(ValueError):
        classify([1, 0, 0, 0], 0.0)


def test_ball_examples():
    assert np.allclose(to_poincare_ball(origin(2)), 0)
    p = boost_axis_point(1.0, [1.0, 0.0, 0.0])
    assert np.allclose(to_poincare_ball(p), [math.tanh(0.5), 0, 0])
    with pytest.raises(ModelError):
        to_poincare_ball([0, 1, 0, 0])


@given(arrays(np.float64, 3, elements=st.floats(-0.95, 0.95)))
def test_ball_round_trip(b):
    if np.linalg.norm(b) >= 0.99:
        b = b / np.linalg.norm(b) * 0.9
    p = from_poincare_ball(b)
    assert on_hyperboloid(p)
    assert np.allclose(to_poincare_ball(p), b, atol=1e-12)
    assert np.linalg.norm(to_poincare_ball(p)) < 1


def test_distance_along_axis():
    for t in (0.0, 0.3, 2.0, 5.0):
        assert hyperbolic_distance(origin(2), boost_axis_point(t, [0, 1.0, 0])) == pytest.approx(t, abs=1e-7)


@settings(max_examples=50)
@given(st.floats(0, 3), st.floats(0, 3), st.floats(0, math.pi))
def test_distance_triangle_inequality(r1, r2, ang):
    a = boost_axis_point(r1, [1.0, 0, 0])
    b = boost_axis_point(r2, [math.cos(ang), math.sin(ang), 0])
    o = origin(2)
    assert hyperbolic_distance(a, b) <= hyperbolic_distance(a, o) + hyperbolic_distance(o, b) + 1e-9


def test_ball_and_distance_reference_points():
    q = np.array([math.cosh(2), 0, math.sinh(2), 0])
    assert np.allclose(to_poincare_ball(q), [0, math.tanh(1), 0], atol=1e-15)
    a = np.array([math.cosh(1), math.sinh(1), 0, 0])
    b = np.array([math.cosh(1), -math.sinh(1), 0, 0])
    assert hyperbolic_distance(a, b) == pytest.approx(2.0, abs=1e-12)
    assert hyperbolic_distance(origin(2), origin(2)) == 0
