"""Domains in S^n and structured parameter grids over them.

A :class:`ParameterGrid` is a union of structured patches. Each patch is a
regular array of nodes in some parameter coordinates (Mercator-polar for
rotationally adapted grids in S^2, stereographic cubes otherwise), stored
contiguously in the flat node arrays. Nodes outside the domain are kept as
inactive placeholders so finite-difference stencils can be indexed
structurally. ``owned`` marks the nodes that belong to the exported surface;
overlap nodes of a two-chart atlas are halo only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .sphere import StereographicChart, normalize, north_pole, spherical_distance, tangent_frame

FULL = "full_sphere"
PUNCTURED = "punctured"
CAP_COMPLEMENT = "cap_complement"
BAND = "latitude_band"

# two-chart atlas handoff: each chart reaches pi/2 + 0.2 from its centre
HANDOFF = 0.2


@dataclass(eq=False)
class DomainSpec:
    """An open domain in S^n.

    Use the constructors :meth:`full_sphere`, :meth:`punctured`,
    :meth:`cap_complement` and :meth:`latitude_band`. ``margin`` is the
    default distance from the boundary kept free of grid nodes.
    """

    kind: str
    dim: int = 2
    points: np.ndarray | None = None
    center: np.ndarray | None = None
    angular_radius: float | None = None
    theta_min: float | None = None
    theta_max: float | None = None
    axis: np.ndarray | None = None
    margin: float = 0.0

    @classmethod
    def full_sphere(cls, n: int = 2) -> "DomainSpec":
        return cls(FULL, dim=n)

    @classmethod
    def punctured(cls, points, margin: float = 0.0) -> "DomainSpec":
        pts = normalize(np.atleast_2d(np.asarray(points, dtype=float)))
        for a, b in itertools.combinations(range(len(pts)), 2):
            if spherical_distance(pts[a], pts[b]) < 1e-12:
                raise ValueError("punctures must be distinct")
        return cls(PUNCTURED, dim=pts.shape[1] - 1, points=pts, margin=margin)

    @classmethod
    def cap_complement(cls, center, angular_radius: float, margin: float = 0.0) -> "DomainSpec":
        if not 0 < angular_radius < np.pi:
            raise ValueError("angular radius must lie in (0, pi)")
        c = normalize(center)
        return cls(CAP_COMPLEMENT, dim=c.shape[0] - 1, center=c,
                   angular_radius=float(angular_radius), margin=margin)

    @classmethod
    def latitude_band(cls, theta_min: float, theta_max: float, axis=None,
                      n: int = 2, margin: float = 0.0) -> "DomainSpec":
        if not 0 <= theta_min < theta_max <= np.pi:
            raise ValueError("need 0 <= theta_min < theta_max <= pi")
        a = north_pole(n) if axis is None else normalize(axis)
        return cls(BAND, dim=a.shape[0] - 1, theta_min=float(theta_min),
                   theta_max=float(theta_max), axis=a, margin=margin)

    @property
    def has_boundary(self) -> bool:
        if self.kind == BAND:
            return True
        return self.kind != FULL

    def polar_angle(self, x) -> np.ndarray:
        """Angle from the band axis (band) or from the cap centre (cap complement)."""
        pole = self.axis if self.kind == BAND else self.center
        return spherical_distance(x, pole)

    def boundary_distance(self, x) -> np.ndarray:
        """Spherical distance to the boundary; negative outside the domain, inf without boundary."""
        x = np.asarray(x, dtype=float)
        if self.kind == FULL:
            return np.full(x.shape[:-1], np.inf)
        if self.kind == PUNCTURED:
            d = np.stack([spherical_distance(x, p) for p in self.points], axis=-1)
            return np.min(d, axis=-1)
        if self.kind == CAP_COMPLEMENT:
            return spherical_distance(x, self.center) - self.angular_radius
        th = spherical_distance(x, self.axis)
        lo = th - self.theta_min if self.theta_min > 0 else th
        hi = self.theta_max - th if self.theta_max < np.pi else np.pi - th
        return np.minimum(lo, hi)

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        d = self.boundary_distance(x)
        if margin > 0:
            return d >= margin
        return d > 0

    def boundary_points(self) -> list[np.ndarray]:
        """One representative point on each boundary component."""
        if self.kind == FULL:
            return []
        if self.kind == PUNCTURED:
            return [p.copy() for p in self.points]
        if self.kind == CAP_COMPLEMENT:
            e = tangent_frame(self.center)[:, 0]
            r = self.angular_radius
            return [np.cos(r) * self.center + np.sin(r) * e]
        e = tangent_frame(self.axis)[:, 0]
        out = []
        for th in (self.theta_min, self.theta_max):
            out.append(normalize(np.cos(th) * self.axis + np.sin(th) * e))
        return out

    def approach_sequence(self, boundary_point, k_max: int = 20, start: float = 0.5) -> np.ndarray:
        """Points at distance ``start / 2**k`` (k = 1..k_max) from a boundary point, inside the domain."""
        b = normalize(boundary_point)
        direction = self._inward_direction(b)
        ks = np.arange(1, k_max + 1)
        dist = 2.0 * start / 2.0**ks
        pts = np.cos(dist)[:, None] * b + np.sin(dist)[:, None] * direction
        return normalize(pts)

    def _inward_direction(self, b):
        if self.kind == PUNCTURED:
            # any direction; pick one pointing away from the other punctures
            frame = tangent_frame(b)
            cands = np.concatenate([frame.T, -frame.T])
            if len(self.points) > 1:
                others = [p for p in self.points if spherical_distance(p, b) > 1e-12]
                score = [min(np.dot(c, o) for o in others) for c in cands]
                return cands[int(np.argmin(score))]
            return cands[0]
        pole = self.axis if self.kind == BAND else self.center
        towards_pole = pole - np.dot(pole, b) * b
        nrm = np.linalg.norm(towards_pole)
        if nrm < 1e-14:
            # boundary point is the pole itself (band reaching theta = 0 or pi)
            return tangent_frame(b)[:, 0]
        towards_pole /= nrm
        th = spherical_distance(b, pole)
        if self.kind == CAP_COMPLEMENT:
            return -towards_pole
        # band: inward means towards larger theta at theta_min, smaller at theta_max
        return -towards_pole if abs(th - self.theta_min) < abs(th - self.theta_max) else towards_pole

    def to_json(self) -> dict:
        d = {"kind": self.kind, "n": self.dim, "margin": self.margin}
        if self.points is not None:
            d["points"] = self.points.tolist()
        if self.center is not None:
            d["center"] = self.center.tolist()
            d["angular_radius"] = self.angular_radius
        if self.axis is not None:
            d["axis"] = self.axis.tolist()
            d["theta_min"] = self.theta_min
            d["theta_max"] = self.theta_max
        return d


@dataclass(frozen=True)
class Patch:
    """A structured block of nodes ``[start, start + prod(shape))`` in C order."""

    start: int
    shape: tuple
    periodic: tuple
    steps: tuple
    chart: str
    pole: tuple = ()

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def stop(self) -> int:
        return self.start + self.size


@dataclass(eq=False)
class ParameterGrid:
    points: np.ndarray
    params: np.ndarray
    active: np.ndarray
    owned: np.ndarray
    patches: list
    domain: DomainSpec | None = None
    margin: float = 0.0
    _triangles: np.ndarray | None = field(default=None, repr=False)
    _edges: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def node_count(self) -> int:
        return int(np.count_nonzero(self.owned))

    def owned_points(self) -> np.ndarray:
        return self.points[self.owned]

    def patch_of(self, node: int) -> Patch:
        for p in self.patches:
            if p.start <= node < p.stop:
                return p
        raise IndexError(node)

    def index_of(self, node: int) -> tuple:
        p = self.patch_of(node)
        return p, np.unravel_index(node - p.start, p.shape)

    @property
    def triangles(self) -> np.ndarray:
        """Triangles (n = 2 only) over owned nodes, two per structured cell."""
        if self._triangles is None:
            self._triangles = _triangulate(self)
        return self._triangles

    @property
    def edges(self) -> np.ndarray:
        """Axis-aligned neighbour pairs with both ends owned."""
        if self._edges is None:
            self._edges = _edges(self)
        return self._edges


def _patch_index(p: Patch) -> np.ndarray:
    return np.arange(p.start, p.stop).reshape(p.shape)


def _neighbour(idx: np.ndarray, axis: int, periodic: bool):
    """(base, neighbour) index arrays for the +1 step along ``axis``."""
    if periodic:
        nb = np.roll(idx, -1, axis=axis)
        return idx, nb
    sl_a = [slice(None)] * idx.ndim
    sl_b = [slice(None)] * idx.ndim
    sl_a[axis] = slice(0, -1)
    sl_b[axis] = slice(1, None)
    return idx[tuple(sl_a)], idx[tuple(sl_b)]


def _edges(grid: ParameterGrid) -> np.ndarray:
    out = []
    for p in grid.patches:
        idx = _patch_index(p)
        for ax in range(len(p.shape)):
            a, b = _neighbour(idx, ax, p.periodic[ax])
            a, b = a.ravel(), b.ravel()
            keep = grid.owned[a] & grid.owned[b]
            out.append(np.stack([a[keep], b[keep]], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=int)


def _triangulate(grid: ParameterGrid) -> np.ndarray:
    if grid.dim != 2:
        raise ValueError("triangle connectivity is only defined for n = 2")
    out = []
    for p in grid.patches:
        idx = _patch_index(p)
        a, b = _neighbour(idx, 0, p.periodic[0])
        a, c = _neighbour(a, 1, p.periodic[1])
        b, d = _neighbour(b, 1, p.periodic[1])
        a, b, c, d = (v.ravel() for v in (a, b, c, d))
        ok = grid.owned[a] & grid.owned[b] & grid.owned[c] & grid.owned[d]
        a, b, c, d = a[ok], b[ok], c[ok], d[ok]
        out.append(np.stack([a, b, d], axis=1))
        out.append(np.stack([a, d, c], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 3), dtype=int)


def mercator(theta):
    return np.log(np.tan(np.asarray(theta) / 2.0))


def inverse_mercator(z):
    return 2.0 * np.arctan(np.exp(np.asarray(z)))


def _polar_patch(axis, theta_lo, theta_hi, n_theta, n_phi, spacing, start=0):
    if spacing == "mercator":
        s = np.linspace(mercator(theta_lo), mercator(theta_hi), n_theta)
        theta = inverse_mercator(s)
    elif spacing == "uniform":
        s = np.linspace(theta_lo, theta_hi, n_theta)
        theta = s
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    frame = tangent_frame(axis)
    b1, b2 = frame[:, 0], frame[:, 1]
    T, P = np.meshgrid(theta, phi, indexing="ij")
    pts = (np.cos(T)[..., None] * axis
           + np.sin(T)[..., None] * (np.cos(P)[..., None] * b1 + np.sin(P)[..., None] * b2))
    S, _ = np.meshgrid(s, phi, indexing="ij")
    params = np.stack([S, P], axis=-1).reshape(-1, 2)
    steps = (float(s[1] - s[0]), float(2 * np.pi / n_phi))
    patch = Patch(start, (n_theta, n_phi), (False, True), steps, f"polar-{spacing}", tuple(axis))
    return normalize(pts.reshape(-1, 3)), params, patch


def _cube_patch(pole, half_width, resolution, start=0):
    chart = StereographicChart(pole)
    n = chart.dim
    axes = [np.linspace(-half_width, half_width, r) for r in resolution]
    U = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    pts = normalize(chart.inverse(U))
    steps = tuple(float(a[1] - a[0]) for a in axes)
    patch = Patch(start, tuple(resolution), (False,) * n, steps, "stereographic", tuple(chart.pole))
    return pts, U, patch


def _atlas_axis(domain: DomainSpec) -> np.ndarray:
    """Chart pole direction for a two-chart atlas, kept away from punctures and band poles."""
    n = domain.dim
    avoid = []
    if domain.kind == PUNCTURED:
        avoid = list(domain.points)
    elif domain.kind == BAND:
        avoid = [domain.axis]
    elif domain.kind == CAP_COMPLEMENT:
        avoid = [domain.center]
    if not avoid:
        return north_pole(n)
    cands = [np.eye(n + 1)[i] for i in reversed(range(n + 1))]
    cands += [normalize(np.ones(n + 1)), normalize(np.arange(1.0, n + 2))]
    best, best_score = None, -1.0
    for c in cands:
        score = min(min(spherical_distance(c, a), spherical_distance(-c, a)) for a in avoid)
        if score > best_score + 1e-12:
            best, best_score = c, score
    return best


def _two_chart(domain, resolution, margin, axis=None):
    a = _atlas_axis(domain) if axis is None else normalize(axis)
    half = 1.0 / np.tan((np.pi / 2 - HANDOFF) / 2.0)
    pts_list, par_list, patches = [], [], []
    start = 0
    for pole in (a, -a):
        pts, U, patch = _cube_patch(pole, half, resolution, start)
        pts_list.append(pts)
        par_list.append(U)
        patches.append(patch)
        start += patch.size
    pts = np.concatenate(pts_list)
    params = np.concatenate(par_list)
    active = domain.contains(pts, margin) if domain.kind != FULL else np.ones(len(pts), bool)
    # chart with pole a owns the hemisphere x.a < 0; chart with pole -a the rest
    side = pts @ a
    owned = np.concatenate([side[: patches[0].size] < 0, side[patches[0].size:] >= 0]) & active
    return pts, params, active, owned, patches


def build_grid(domain: DomainSpec, resolution, margin: float | None = None,
               spacing: str = "mercator") -> ParameterGrid:
    """Structured grid covering ``domain`` up to distance ``margin`` from its boundary.

    For n = 2, punctured spheres (one puncture, or two antipodal ones), cap
    complements and latitude bands get a single polar patch about the
    natural axis, periodic in longitude and spaced uniformly in the Mercator
    coordinate ``log tan(theta/2)`` (or in ``theta`` with
    ``spacing="uniform"``). The polar singularity opposite a single puncture
    or cap is cut out at distance ``margin``. Everything else, and all
    domains with n >= 3, use a two-chart stereographic atlas, except a single
    puncture in n >= 3 which uses the one chart centred at the puncture.
    """
    n = domain.dim
    resolution = tuple(int(r) for r in np.atleast_1d(resolution))
    if len(resolution) == 1:
        resolution = resolution * n
    if len(resolution) != n:
        raise ValueError(f"need {n} resolution entries, got {len(resolution)}")
    if min(resolution) < 4:
        raise ValueError("resolution must be at least 4 per direction")
    margin = domain.margin if margin is None else float(margin)
    if margin < 0:
        raise ValueError("margin must be non-negative")

    polar = None
    if n == 2:
        if domain.kind == PUNCTURED and len(domain.points) == 1:
            polar = (domain.points[0], margin, np.pi - max(margin, 1e-3))
        elif domain.kind == PUNCTURED and len(domain.points) == 2 and \
                spherical_distance(domain.points[0], -domain.points[1]) < 1e-12:
            polar = (domain.points[0], margin, np.pi - margin)
        elif domain.kind == CAP_COMPLEMENT:
            polar = (domain.center, domain.angular_radius + margin, np.pi - max(margin, 1e-3))
        elif domain.kind == BAND:
            polar = (domain.axis, domain.theta_min + margin, domain.theta_max - margin)

    if polar is not None:
        axis, lo, hi = polar
        if spacing == "mercator":
            lo, hi = max(lo, 1e-6), min(hi, np.pi - 1e-6)
        if hi <= lo:
            raise DomainError("grid is empty: domain is thinner than twice the margin")
        pts, params, patch = _polar_patch(axis, lo, hi, resolution[0], resolution[1], spacing)
        active = np.ones(len(pts), dtype=bool)
        grid = ParameterGrid(pts, params, active, active.copy(), [patch], domain, margin)
    elif domain.kind == PUNCTURED and len(domain.points) == 1:
        p = domain.points[0]
        if margin <= 0:
            raise DomainError("a single-chart grid about a puncture needs a positive margin")
        reach = 1.0 / np.tan(margin / 2.0)
        pts, U, patch = _cube_patch(p, reach, resolution)
        active = np.linalg.norm(U, axis=1) <= reach
        grid = ParameterGrid(pts, U, active, active.copy(), [patch], domain, margin)
    else:
        pts, params, active, owned, patches = _two_chart(domain, resolution, margin)
        grid = ParameterGrid(pts, params, active, owned, patches, domain, margin)

    if not np.any(grid.owned):
        raise DomainError("grid is empty: domain smaller than the margin")
    grid.points[~grid.active] = np.nan
    return grid


def disk_grid(center, radius: float, resolution) -> tuple[np.ndarray, Patch, np.ndarray]:
    """Cartesian grid on the disk of ``radius`` in the plane orthogonal to ``center``.

    Returns the planar coordinates (in the tangent frame of ``center``), the
    patch, and the mask of nodes inside the disk.
    """
    center = normalize(center)
    n = center.shape[0] - 1
    resolution = tuple(int(r) for r in np.atleast_1d(resolution))
    if len(resolution) == 1:
        resolution = resolution * n
    axes = [np.linspace(-radius, radius, r) for r in resolution]
    W = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    inside = np.linalg.norm(W, axis=1) <= radius * (1 + 1e-12)
    patch = Patch(0, resolution, (False,) * n, tuple(float(a[1] - a[0]) for a in axes),
                  "disk", tuple(center))
    return W, patch, inside
