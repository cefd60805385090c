"""Analytic example metrics, reference surfaces and test fixtures.

Entries carry their expectations as plain data so the CLI can print them and
the verification code can check them uniformly.

* ``constant:<c>``: rho = c on the whole sphere. P is half the round metric,
  so relative to the conformal metric its eigenvalues are ``e^{-2c}/2``; the
  surfaces are geodesic spheres of radius ``c + t`` about the origin.
* ``flat-punctured``: the Euclidean metric pulled back by stereographic
  projection from ``p``, ``rho = log((1 + |u|^2)/2) = -log(1 - x.p)``.
  P vanishes and every surface is a horosphere centred at p.
* ``cylindric``: ``rho = -log sin(theta)`` with theta the angle from p, the
  flat cylinder over the equator. Relative to the metric, P has eigenvalues
  -1/2 along meridians and +1/2 along parallels; the surfaces are tubes
  about the geodesic through p and -p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conformal import ConformalMetric
from .correspondence import HypersurfaceMesh
from .domains import DomainSpec, ParameterGrid, Patch, build_grid, disk_grid
from .sphere import ScalarFieldOnSphere, constant_field, normalize, north_pole, tangent_frame

FLAT_MARGIN = 0.2
CYLINDRIC_MARGIN = 0.05


@dataclass(eq=False)
class CatalogEntry:
    id: str
    metric: ConformalMetric
    expected: dict = field(default_factory=dict)
    resolution: tuple = (64, 64)

    def grid(self, resolution=None, margin=None) -> ParameterGrid:
        return build_grid(self.metric.domain, resolution or self.resolution, margin)

    def to_json(self) -> dict:
        return {"id": self.id, "label": self.metric.label, "n": self.metric.dim,
                "domain": self.metric.domain.to_json(), "expected": self.expected,
                "resolution": list(self.resolution)}


def _dot(x, p):
    return np.asarray(x) @ p


def flat_punctured_field(p) -> ScalarFieldOnSphere:
    """``rho = -log(1 - x.p)`` with its ambient derivatives."""
    p = normalize(p)

    def one_minus(x):
        # 1 - x.p = |x - p|^2 / 2 on the sphere, accurate near p
        return 0.5 * np.sum((np.asarray(x) - p) ** 2, axis=-1)

    def value(x):
        return -np.log(one_minus(x))

    def grad(x):
        return p / one_minus(x)[..., None]

    def hess(x):
        w = one_minus(x)
        return np.multiply.outer(1.0 / w**2, np.outer(p, p))

    return ScalarFieldOnSphere(value, grad, hess, label="flat punctured")


def cylindric_field(p) -> ScalarFieldOnSphere:
    """``rho = -log sin(theta) = -log(1 - (x.p)^2) / 2``."""
    p = normalize(p)

    def one_minus_sq(x):
        x = np.asarray(x)
        return 0.25 * np.sum((x - p) ** 2, axis=-1) * np.sum((x + p) ** 2, axis=-1)

    def value(x):
        return -0.5 * np.log(one_minus_sq(x))

    def grad(x):
        s = _dot(x, p)
        return (s / one_minus_sq(x))[..., None] * p

    def hess(x):
        s = _dot(x, p)
        w = one_minus_sq(x)
        return np.multiply.outer((1.0 + s * s) / w**2, np.outer(p, p))

    return ScalarFieldOnSphere(value, grad, hess, label="cylindric")


def make_constant(c: float = 0.0, n: int = 2) -> CatalogEntry:
    c = float(c)
    metric = ConformalMetric(DomainSpec.full_sphere(n), constant_field(c), f"constant:{c:g}")
    expected = {
        "p_round_eigenvalue": 0.5,
        "p_eigenvalue": 0.5 * math.exp(-2 * c),
        "surface": "geodesic sphere about the origin",
        "radius": f"{c:g} + t",
        "kappa": f"coth({c:g} + t)",
        "beta": math.exp(2 * c),
    }
    return CatalogEntry(f"constant:{c:g}", metric, expected)


def make_flat_punctured(p=None, n: int = 2, margin: float = FLAT_MARGIN) -> CatalogEntry:
    p = north_pole(n) if p is None else normalize(p)
    dom = DomainSpec.punctured([p], margin=margin)
    metric = ConformalMetric(dom, flat_punctured_field(p), "flat-punctured")
    expected = {
        "p_zero": True,
        "kappa": 1.0,
        "mean_curvature": 1.0,
        "horosphere_center": p.tolist(),
        "beta_diverges_at": [p.tolist()],
    }
    return CatalogEntry("flat-punctured", metric, expected)


def make_cylindric(p=None, q=None, n: int = 2, margin: float = CYLINDRIC_MARGIN) -> CatalogEntry:
    p = north_pole(n) if p is None else normalize(p)
    q = -p if q is None else normalize(q)
    if np.linalg.norm(p + q) > 1e-12:
        raise ValueError("the cylindric metric needs antipodal punctures")
    dom = DomainSpec.latitude_band(0.0, math.pi, axis=p, n=n, margin=margin)
    metric = ConformalMetric(dom, cylindric_field(p), "cylindric")
    expected = {
        "p_eigenvalues": [-0.5] + [0.5] * (n - 1),
        "kappa": ["tanh(t)"] + ["coth(t)"] * (n - 1),
        "rotation_axis": p.tolist(),
        "girth": 2 * math.pi,
        "beta_diverges_at": [p.tolist(), q.tolist()],
    }
    return CatalogEntry("cylindric", metric, expected, resolution=(128, 64))


def make_horosphere_reference(p=None, s: float = 0.0, radius: float = 2.0,
                              resolution=33, n: int = 2) -> HypersurfaceMesh:
    """The horosphere with constant Gauss map ``p`` and constant support ``s``.

    Parametrized over a disk in the tangent space of p through
    ``phi(w) = (1 + |w|^2) e^s / 2 (1, p) + e^{-s} / 2 (1, -p) + (0, w)``,
    which satisfies ``<phi, (1, p)> = -e^{-s}`` at every node.
    """
    p = north_pole(n) if p is None else normalize(p)
    W, patch, inside = disk_grid(p, radius, resolution)
    E = tangent_frame(p)
    N = len(W)
    l_plus = np.concatenate([[1.0], p])
    l_minus = np.concatenate([[1.0], -p])
    a = math.exp(-s)
    w2 = np.sum(W * W, axis=1)
    phi = (((1.0 + w2) / (2 * a))[:, None] * l_plus + (a / 2) * l_minus
           + np.concatenate([np.zeros((N, 1)), W @ E.T], axis=1))
    psi = np.broadcast_to(l_plus / a, phi.shape).copy()
    eta = phi - psi
    phi[~inside] = eta[~inside] = psi[~inside] = np.nan
    gauss = np.where(inside[:, None], p, np.nan)
    support = np.where(inside, s, np.nan)
    points = gauss.copy()
    grid = ParameterGrid(points, W, inside, inside.copy(), [patch], None, 0.0)
    return HypersurfaceMesh(grid, phi, eta, psi, support, gauss, flow_time=0.0,
                            label=f"horosphere(p, s={s:g})",
                            meta={"center": p.tolist(), "s": s})


@dataclass(eq=False)
class SelfIntersectingFixture:
    """A vertical ribbon over a figure-eight curve in the ball.

    The two branches cross transversally over the planar point ``crossing``;
    their common part is the vertical segment ``crossing x [-z, z]``.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    crossing: np.ndarray
    z_extent: float
    crossing_triangles: np.ndarray      # one sheet's triangles around the crossing

    def distance_to_crossing(self, point) -> float:
        point = np.asarray(point, dtype=float)
        horiz = np.linalg.norm(point[:2] - self.crossing)
        over = max(0.0, abs(point[2]) - self.z_extent)
        return float(math.hypot(horiz, over))

    def without_crossing(self) -> "SelfIntersectingFixture":
        keep = np.ones(len(self.triangles), dtype=bool)
        keep[self.crossing_triangles] = False
        return SelfIntersectingFixture(self.vertices, self.triangles[keep], self.crossing,
                                       self.z_extent, np.zeros(0, dtype=int))


def _chord_crossing(a0, a1, b0, b1):
    """Intersection of planar segments a0a1 and b0b1, or None."""
    r, s = a1 - a0, b1 - b0
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0:
        return None
    d = b0 - a0
    u = (d[0] * s[1] - d[1] * s[0]) / den
    v = (d[0] * r[1] - d[1] * r[0]) / den
    if 0 <= u <= 1 and 0 <= v <= 1:
        return a0 + u * r, u, v
    return None


def make_selfintersecting_fixture(segments: int = 96, scale: float = 0.6,
                                  width: float = 0.1) -> SelfIntersectingFixture:
    """Figure-eight ribbon (lemniscate of Gerono) with one designed crossing.

    Sample parameters are offset from the crossing parameters so that the
    crossing falls strictly inside two chords, and the ribbon half-width
    varies along the curve so the two sheets have different heights there.
    """
    k = np.arange(segments)
    tt = 2 * math.pi * (k + 0.37) / segments
    xy = scale * np.stack([np.cos(tt), np.sin(tt) * np.cos(tt)], axis=1)
    half = width * (1.0 + 0.3 * np.sin(tt))
    bottom = np.column_stack([xy, -half])
    top = np.column_stack([xy, half])
    V = np.concatenate([bottom, top])
    nxt = (k + 1) % segments
    tris = np.concatenate([np.stack([k, nxt, segments + nxt], axis=1),
                           np.stack([k, segments + nxt, segments + k], axis=1)])
    # locate the crossing chords near t = pi/2 and t = 3 pi/2
    crossing, owners = None, None
    for i in range(segments):
        for j in range(i + 2, segments):
            if (j + 1) % segments == i:
                continue
            hit = _chord_crossing(xy[i], xy[(i + 1) % segments], xy[j], xy[(j + 1) % segments])
            if hit is not None:
                if crossing is not None:
                    raise RuntimeError("fixture has more than one chord crossing")
                crossing, owners = hit[0], (i, j, hit[1], hit[2])
    i, j, u, v = owners
    # wall heights over the crossing point (top edges are straight between samples)
    hi_i = (1 - u) * half[i] + u * half[(i + 1) % segments]
    hi_j = (1 - v) * half[j] + v * half[(j + 1) % segments]
    z = float(min(hi_i, hi_j))
    near = [(i + d) % segments for d in range(-2, 3)]
    crossing_tris = np.concatenate([np.array(near), np.array(near) + segments])
    return SelfIntersectingFixture(V, tris, crossing, z, crossing_tris)


def get_entry(entry_id: str, n: int = 2) -> CatalogEntry:
    if entry_id.startswith("constant"):
        _, _, c = entry_id.partition(":")
        try:
            value = float(c) if c else 0.0
        except ValueError:
            raise KeyError(f"bad constant in catalog id {entry_id!r}") from None
        return make_constant(value, n)
    if entry_id == "flat-punctured":
        return make_flat_punctured(n=n)
    if entry_id == "cylindric":
        return make_cylindric(n=n)
    raise KeyError(f"unknown catalog id {entry_id!r}")


def list_entries() -> list[str]:
    return ["constant:<c>", "flat-punctured", "cylindric"]
