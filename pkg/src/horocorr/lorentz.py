"""Minkowski space R^{1,n+1} and its model sets.

Vectors are plain numpy arrays whose last axis holds ``(x0, x1, ..., x_{n+1})``.
Every function broadcasts over leading axes.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DimensionError, ModelError

DEFAULT_TOL = 1e-9


class Model(enum.Enum):
    HYPERBOLOID = "hyperboloid"
    DE_SITTER = "de_sitter"
    NULL_CONE_PLUS = "null_cone_plus"
    OTHER = "other"


def origin(n: int = 2) -> np.ndarray:
    """The base point (1, 0, ..., 0) of H^{n+1}."""
    o = np.zeros(n + 2)
    o[0] = 1.0
    return o


def _split(a):
    # Veltkamp split for error-free products
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def mink_inner(u, v) -> np.ndarray:
    """Lorentzian inner product ``-u0 v0 + sum_i ui vi``.

    Products are formed error-free and summed with compensation, so the
    result is the correctly rounded inner product of the stored vectors up to
    a few ulps. This matters for points far out on the hyperboloid where
    ``x0**2`` is large and the terms cancel.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    u, v = np.broadcast_arrays(u, v)
    p, e = _two_prod(-u[..., 0], v[..., 0])
    s = p
    comp = e
    for i in range(1, u.shape[-1]):
        p, e = _two_prod(u[..., i], v[..., i])
        t = s + p
        # Neumaier-style two-sum
        big = np.abs(s) >= np.abs(p)
        comp = comp + np.where(big, (s - t) + p, (p - t) + s) + e
        s = t
    out = s + comp
    return out if out.ndim else float(out)


def mink_norm_sq(u) -> np.ndarray:
    return mink_inner(u, u)


def classify(v, tol: float = DEFAULT_TOL) -> Model:
    """Which model set ``v`` belongs to; tested in the order of :class:`Model`."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    q = mink_inner(v, v)
    if abs(q + 1.0) <= tol and v[0] > 0:
        return Model.HYPERBOLOID
    if abs(q - 1.0) <= tol:
        return Model.DE_SITTER
    if abs(q) <= tol and v[0] > 0:
        return Model.NULL_CONE_PLUS
    return Model.OTHER


def on_hyperboloid(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorized membership test for H^{n+1}."""
    p = np.asarray(p, dtype=float)
    return (np.abs(mink_inner(p, p) + 1.0) <= tol) & (p[..., 0] > 0)


def _require_hyperboloid(p, tol, name="point"):
    ok = on_hyperboloid(p, tol)
    if not np.all(ok):
        raise ModelError(f"{name} is not on the hyperboloid within tol={tol:g}")


def normalize_timelike(v) -> np.ndarray:
    """Scale a future timelike vector onto the hyperboloid."""
    v = np.asarray(v, dtype=float)
    q = mink_inner(v, v)
    if np.any(q >= 0):
        raise ModelError("vector is not timelike")
    out = v / np.sqrt(-q)[..., None]
    return np.where(out[..., :1] < 0, -out, out)


def to_poincare_ball(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Map hyperboloid points to the Poincare ball: ``(x1..x_{n+1}) / (1 + x0)``."""
    p = np.asarray(p, dtype=float)
    _require_hyperboloid(p, tol)
    return p[..., 1:] / (1.0 + p[..., :1])


def from_poincare_ball(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    r2 = np.sum(b * b, axis=-1, keepdims=True)
    if np.any(r2 >= 1.0):
        raise ModelError("ball point has norm >= 1")
    return np.concatenate([(1.0 + r2), 2.0 * b], axis=-1) / (1.0 - r2)


def hyperbolic_distance(p, q, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Geodesic distance ``arccosh(-<p,q>)`` with the argument clamped to >= 1."""
    _require_hyperboloid(p, tol, "p")
    _require_hyperboloid(q, tol, "q")
    c = np.maximum(-mink_inner(p, q), 1.0)
    d = np.arccosh(c)
    return d if np.ndim(d) else float(d)


def boost_axis_point(t: float, direction) -> np.ndarray:
    """The point at distance ``t`` from the origin along a unit spatial direction."""
    w = np.asarray(direction, dtype=float)
    return np.concatenate([[np.cosh(t)], np.sinh(t) * w])
