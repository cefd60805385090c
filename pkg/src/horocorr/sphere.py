"""Calculus on the round unit sphere S^n inside R^{n+1}.

Points are unit vectors, tangent vectors are ambient vectors orthogonal to
their base point. Scalar fields expose ``value``, ``gradient`` (ambient
tangent vector) and ``hessian`` (covariant Hessian as an n x n matrix in an
orthonormal tangent frame). All evaluators broadcast over leading axes.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12
GRAD_STEP = 1e-4
HESS_STEP = 1e-3


def normalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def north_pole(n: int = 2) -> np.ndarray:
    e = np.zeros(n + 1)
    e[-1] = 1.0
    return e


def spherical_distance(a, b) -> np.ndarray:
    """Great-circle distance, computed with atan2 so it stays accurate near 0 and pi."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = 2.0 * np.arctan2(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))
    return d if np.ndim(d) else float(d)


def tangent_frame(x) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``x``, shape ``(..., n+1, n)``.

    Built from the Householder reflection that sends ``x`` to a multiple of
    the last coordinate axis, so it is smooth away from one hemisphere seam
    and exactly orthonormal.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    sign = np.where(x[..., -1] >= 0, 1.0, -1.0)
    v = x.copy()
    v[..., -1] += sign
    vv = np.sum(v * v, axis=-1)[..., None, None]
    H = np.eye(m) - 2.0 * v[..., :, None] * v[..., None, :] / vv
    return H[..., :, :-1]


def project_tangent(x, v) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return v - np.sum(v * x, axis=-1, keepdims=True) * x


def sphere_geodesic(x, v, t) -> np.ndarray:
    """Point at arclength ``t`` along the great circle from ``x`` with unit velocity ``v``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(np.linalg.norm(v, axis=-1) - 1.0) > 1e-10):
        raise ValueError("geodesic direction must be a unit vector")
    t = np.asarray(t, dtype=float)[..., None]
    return normalize(np.cos(t) * x + np.sin(t) * v)


class StereographicChart:
    """Stereographic projection from ``pole`` onto the tangent plane at ``-pole``.

    ``forward(x) = B^T x / (1 - x.pole)`` where the columns of ``B`` span the
    orthogonal complement of the pole; the antipode of the pole maps to 0 and
    the pulled-back round metric is ``conformal_factor(u)**2`` times the
    Euclidean one.
    """

    def __init__(self, pole):
        self.pole = normalize(pole)
        self.dim = self.pole.shape[0] - 1
        self.basis = tangent_frame(self.pole)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # 1 - x.p == |x - p|^2 / 2 on the unit sphere, without cancellation
        den = 0.5 * np.sum((x - self.pole) ** 2, axis=-1)
        if np.any(den <= 0.0):
            raise DomainError("stereographic forward map evaluated at its pole")
        return (x @ self.basis) / den[..., None]

    def inverse(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        r2 = np.sum(u * u, axis=-1, keepdims=True)
        num = 2.0 * (u @ self.basis.T) + (r2 - 1.0) * self.pole
        return num / (1.0 + r2)

    def conformal_factor(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return 2.0 / (1.0 + np.sum(u * u, axis=-1))

    def jacobian(self, u) -> np.ndarray:
        """Ambient coordinate vectors ``dX/du_i`` as columns, shape ``(..., n+1, n)``."""
        u = np.asarray(u, dtype=float)
        d = 1.0 + np.sum(u * u, axis=-1)[..., None, None]
        X = self.inverse(u)
        B = np.broadcast_to(self.basis, u.shape[:-1] + self.basis.shape)
        ui = u[..., None, :]
        return (2.0 * B + 2.0 * ui * (self.pole[:, None] - X[..., :, None])) / d


def stereographic_chart(pole) -> StereographicChart:
    return StereographicChart(pole)


def _split_by_chart(x, pole):
    """Index masks: use the chart whose pole is farther from each point."""
    x = np.asarray(x, dtype=float)
    if pole is not None:
        return [(StereographicChart(pole), np.ones(x.shape[:-1], dtype=bool))]
    n = x.shape[-1] - 1
    north = StereographicChart(north_pole(n))
    south = StereographicChart(-north_pole(n))
    use_north = x[..., -1] <= 0
    return [(north, use_north), (south, ~use_north)]


def _eval(f, pts):
    vals = np.asarray(f(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("field evaluation failed (outside its domain?)")
    return vals


def sph_gradient(f: Callable, x, step: float = GRAD_STEP, pole=None) -> np.ndarray:
    """Central-difference spherical gradient as an ambient tangent vector.

    Differences are taken in a stereographic chart (the one whose pole is
    farther from ``x`` unless ``pole`` is given) with a chart step that
    corresponds to ``step`` radians on the sphere.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for chart, mask in _split_by_chart(x, pole):
        if not np.any(mask):
            continue
        xs = x[mask]
        u = chart.forward(xs)
        n = u.shape[-1]
        du = step / chart.conformal_factor(u)
        c = chart.conformal_factor(u)
        J = chart.jacobian(u)
        eye = np.eye(n)
        grad_u = np.empty(u.shape)
        for i in range(n):
            h = du[..., None] * eye[i]
            fp = _eval(f, chart.inverse(u + h))
            fm = _eval(f, chart.inverse(u - h))
            grad_u[..., i] = (fp - fm) / (2.0 * du)
        # g^{ij} = delta_ij / c^2 ; ambient gradient = sum_i g^{ii} df_i dX/du_i
        out[mask] = np.einsum("...ai,...i->...a", J, grad_u) / (c**2)[..., None]
    return out


def sph_hessian(f: Callable, x, step: float = HESS_STEP, frame=None, pole=None) -> np.ndarray:
    """Covariant Hessian by central differences in a stereographic chart.

    The chart second derivatives are corrected by the Christoffel symbols of
    the conformally flat chart metric ``c(u)^2 du^2`` and then expressed in
    the orthonormal tangent ``frame`` (default :func:`tangent_frame`).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] - 1
    if frame is None:
        frame = tangent_frame(x)
    out = np.zeros(x.shape[:-1] + (n, n))
    eye = np.eye(n)
    for chart, mask in _split_by_chart(x, pole):
        if not np.any(mask):
            continue
        xs = x[mask]
        E = np.broadcast_to(frame, x.shape[:-1] + (n + 1, n))[mask]
        u = chart.forward(xs)
        c = chart.conformal_factor(u)
        h = step / c
        f0 = _eval(f, xs)
        fpl = {}
        for i in range(n):
            for s in (1, -1):
                fpl[(i, s)] = _eval(f, chart.inverse(u + s * h[..., None] * eye[i]))
        d1 = np.stack([(fpl[(i, 1)] - fpl[(i, -1)]) / (2 * h) for i in range(n)], axis=-1)
        d2 = np.empty(u.shape[:-1] + (n, n))
        for i in range(n):
            d2[..., i, i] = (fpl[(i, 1)] - 2 * f0 + fpl[(i, -1)]) / h**2
            for j in range(i + 1, n):
                acc = 0.0
                for si in (1, -1):
                    for sj in (1, -1):
                        pt = chart.inverse(u + h[..., None] * (si * eye[i] + sj * eye[j]))
                        acc = acc + si * sj * _eval(f, pt)
                d2[..., i, j] = d2[..., j, i] = acc / (4 * h**2)
        # Christoffel correction for g = c^2 delta, w = log c
        r2 = np.sum(u * u, axis=-1)
        dw = -2.0 * u / (1.0 + r2)[..., None]
        gam = (
            d1[..., :, None] * dw[..., None, :]
            + dw[..., :, None] * d1[..., None, :]
            - np.sum(dw * d1, axis=-1)[..., None, None] * eye
        )
        hess_chart = (d2 - gam) / (c**2)[..., None, None]
        F = chart.jacobian(u) / c[..., None, None]
        R = np.einsum("...ai,...aj->...ij", F, E)
        out[mask] = np.einsum("...ki,...kl,...lj->...ij", R, hess_chart, R)
    return out


class ScalarFieldOnSphere:
    """A smooth function on (part of) S^n with gradient and covariant Hessian.

    Analytic fields are specified by an extension ``F`` to a neighbourhood in
    R^{n+1} together with its Euclidean gradient ``dF`` and Hessian ``d2F``;
    the spherical quantities follow from

        grad f = P dF,     Hess f = P d2F P - (x . dF) P,

    where ``P`` projects onto the tangent space. Fields built with
    :meth:`finite_difference` only need ``value`` and use chart differences.
    """

    def __init__(self, value, ambient_gradient=None, ambient_hessian=None, *,
                 mode: str = "analytic", grad_step: float = GRAD_STEP,
                 hess_step: float = HESS_STEP, label: str = ""):
        if mode not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "analytic" and (ambient_gradient is None or ambient_hessian is None):
            raise ValueError("analytic fields need ambient gradient and Hessian")
        self._value = value
        self._dF = ambient_gradient
        self._d2F = ambient_hessian
        self.mode = mode
        self.grad_step = grad_step
        self.hess_step = hess_step
        self.label = label

    @classmethod
    def finite_difference(cls, value, grad_step: float = GRAD_STEP,
                          hess_step: float = HESS_STEP, label: str = "") -> "ScalarFieldOnSphere":
        return cls(value, mode="finite_difference", grad_step=grad_step,
                   hess_step=hess_step, label=label)

    def as_finite_difference(self, grad_step: float = GRAD_STEP,
                             hess_step: float = HESS_STEP) -> "ScalarFieldOnSphere":
        return type(self).finite_difference(self._value, grad_step, hess_step,
                                            label=self.label + " (fd)")

    def value(self, x) -> np.ndarray:
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    __call__ = value

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.mode == "finite_difference":
            return sph_gradient(self._value, x, self.grad_step)
        return project_tangent(x, self._dF(x))

    def hessian(self, x, frame=None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if frame is None:
            frame = tangent_frame(x)
        if self.mode == "finite_difference":
            return sph_hessian(self._value, x, self.hess_step, frame=frame)
        D2 = self._d2F(x)
        radial = np.sum(x * self._dF(x), axis=-1)
        H = np.einsum("...ai,...ab,...bj->...ij", frame, D2, frame)
        return H - radial[..., None, None] * np.eye(frame.shape[-1])


def constant_field(c: float) -> ScalarFieldOnSphere:
    c = float(c)
    return ScalarFieldOnSphere(
        lambda x: np.full(np.shape(x)[:-1], c),
        lambda x: np.zeros(np.shape(x)),
        lambda x: np.zeros(np.shape(x) + (np.shape(x)[-1],)),
        label=f"constant {c:g}",
    )


def linear_field(e, scale: float = 1.0) -> ScalarFieldOnSphere:
    """``f(x) = scale * (x . e)``."""
    e = np.asarray(e, dtype=float)
    return ScalarFieldOnSphere(
        lambda x: scale * (x @ e),
        lambda x: np.broadcast_to(scale * e, np.shape(x)).copy(),
        lambda x: np.zeros(np.shape(x) + (e.shape[0],)),
        label=f"linear {scale:g}",
    )
