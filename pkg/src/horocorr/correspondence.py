"""Conformal metric <-> hypersurface in H^{n+1}.

For a conformal factor rho on a domain of S^n and a shift t, each node x
gives, with ``s = rho(x) + t`` and ``g = grad rho(x)``,

    psi = e^s (1, x)
    phi = (e^s + e^{-s}(1 + |g|^2)) / 2 * (1, x) + e^{-s} (0, g - x)
    eta = phi - psi

so ``psi`` is the light-cone map, ``x`` the hyperbolic Gauss map and ``s``
the horospherical support function of the immersion ``phi``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .conformal import ConformalMetric, p_tensor
from .curvature import fd_principal_curvatures
from .domains import ParameterGrid
from .errors import DegenerateImmersionWarning, MathDomainError
from .lorentz import mink_inner
from .sphere import spherical_distance

KAPPA_POLE_TOL = 1e-9
FLOW_LATTICE = 1e-3


@dataclass(eq=False)
class HypersurfaceMesh:
    """Samples of an immersion over a parameter grid.

    Arrays are indexed by grid node; nodes outside the domain hold NaN.
    ``kappas`` are FD curvatures (ascending) once computed, ``lambdas`` the
    rescaled P-eigenvalues ``e^{-2t} lambda_i`` when the mesh came from a
    metric.
    """

    grid: ParameterGrid
    phi: np.ndarray
    eta: np.ndarray
    psi: np.ndarray
    support: np.ndarray
    gauss: np.ndarray
    kappas: np.ndarray | None = None
    lambdas: np.ndarray | None = None
    flow_time: float = 0.0
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.phi.shape[1] - 2

    @property
    def owned(self) -> np.ndarray:
        return self.grid.owned

    def with_curvatures(self) -> "HypersurfaceMesh":
        return replace(self, kappas=fd_principal_curvatures(self))

    def invariant_errors(self) -> dict:
        """Largest violations of the model invariants over owned nodes."""
        o = self.owned
        phi, eta, psi = self.phi[o], self.eta[o], self.psi[o]
        scale = np.maximum(1.0, np.abs(psi).max(axis=1))
        return {
            "phi_phi": float(np.max(np.abs(mink_inner(phi, phi) + 1.0))),
            "eta_eta": float(np.max(np.abs(mink_inner(eta, eta) - 1.0))),
            "phi_eta": float(np.max(np.abs(mink_inner(phi, eta)))),
            "phi_psi": float(np.max(np.abs(mink_inner(phi, psi) + 1.0))),
            "psi_split": float(np.max(np.abs(psi - (phi - eta)).max(axis=1) / scale)),
        }


def _surface_vectors(x, s, g):
    es = np.exp(s)
    ems = np.exp(-s)
    g2 = np.sum(g * g, axis=-1)
    a = 0.5 * (es + ems * (1.0 + g2))
    b = 0.5 * (ems * (1.0 + g2) - es)          # a - e^s, without cancellation
    tail = ems[:, None] * (g - x)
    one_x = np.concatenate([np.ones((len(x), 1)), x], axis=1)
    zero_tail = np.concatenate([np.zeros((len(x), 1)), tail], axis=1)
    phi = a[:, None] * one_x + zero_tail
    eta = b[:, None] * one_x + zero_tail
    psi = es[:, None] * one_x
    return phi, eta, psi


def metric_to_hypersurface(metric: ConformalMetric, t: float, grid: ParameterGrid,
                           strict: bool = False, curvatures: bool = False) -> HypersurfaceMesh:
    """Sample the hypersurface of ``e^{2t}`` times the metric over ``grid``.

    Where some ``e^{-2t} lambda_i`` reaches 1/2 the map is not an immersion:
    a :class:`DegenerateImmersionWarning` is issued, or
    :class:`MathDomainError` raised with ``strict=True``.
    """
    if grid.dim != metric.dim:
        raise ValueError(f"grid dimension {grid.dim} does not match metric dimension {metric.dim}")
    act = grid.active
    x = grid.points[act]
    metric.check_inside(x)
    rho = metric.rho.value(x)
    g = metric.rho.gradient(x)
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(g))):
        raise MathDomainError("conformal factor evaluation failed on the grid")
    N, m = grid.size, grid.dim + 2
    phi = np.full((N, m), np.nan)
    eta = np.full((N, m), np.nan)
    psi = np.full((N, m), np.nan)
    support = np.full(N, np.nan)
    gauss = np.full((N, m - 1), np.nan)
    lambdas = np.full((N, m - 2), np.nan)
    s = rho + t
    phi[act], eta[act], psi[act] = _surface_vectors(x, s, g)
    support[act] = s
    gauss[act] = x
    lambdas[act] = math.exp(-2.0 * t) * p_tensor(metric, x, check_domain=False).eigenvalues

    top = np.where(grid.owned, lambdas[:, -1], -np.inf)
    bad = top >= 0.5 - 1e-12
    if np.any(bad):
        i = int(np.argmax(bad))
        msg = (f"eigenvalues reach 1/2 at {int(bad.sum())} node(s) (max {top.max():.6g}); "
               f"not an immersion there, first witness x = {grid.points[i].tolist()}")
        if strict:
            raise MathDomainError(msg, witness=grid.points[i].tolist())
        warnings.warn(msg, DegenerateImmersionWarning, stacklevel=2)

    mesh = HypersurfaceMesh(grid, phi, eta, psi, support, gauss, lambdas=lambdas,
                            flow_time=float(t), label=metric.label)
    if curvatures:
        mesh = mesh.with_curvatures()
    return mesh


def min_flow_time(metric: ConformalMetric, grid: ParameterGrid, margin: float = 0.05) -> float:
    """Smallest ``t >= 0`` on a 1e-3 lattice with ``e^{-2t} max lambda <= 1/2 - margin``."""
    if not 0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 1/2)")
    lam_max = float(np.max(p_tensor(metric, grid.owned_points()).eigenvalues[:, -1]))
    target = 0.5 - margin
    if lam_max <= target:
        return 0.0
    k = math.ceil(0.5 * math.log(lam_max / target) / FLOW_LATTICE)
    while math.exp(-2 * k * FLOW_LATTICE) * lam_max > target:
        k += 1
    while k > 0 and math.exp(-2 * (k - 1) * FLOW_LATTICE) * lam_max <= target:
        k -= 1
    return round(k * FLOW_LATTICE, 10)


def hypersurface_to_metric(phi, eta=None):
    """Gauss map and support function from ``phi`` and ``eta`` (or a mesh).

    Returns ``(gauss, support)``.
    """
    if isinstance(phi, HypersurfaceMesh):
        phi, eta = phi.phi, phi.eta
    phi = np.asarray(phi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    psi = phi - eta
    p0 = psi[..., 0]
    bad = ~(p0 > 0) & np.isfinite(p0)
    if np.any(bad):
        i = int(np.argmax(bad.ravel()))
        raise MathDomainError(f"phi - eta is not future pointing at node {i}", witness=i)
    with np.errstate(invalid="ignore", divide="ignore"):
        support = np.log(p0)
        gauss = psi[..., 1:] / p0[..., None]
    return gauss, support


def lambda_from_kappa(kappa):
    """``1/2 - 1/(1 + kappa)``."""
    k = np.asarray(kappa, dtype=float)
    if np.any(k == -1.0):
        raise MathDomainError("kappa = -1 is the pole of the dictionary")
    out = 0.5 - 1.0 / (1.0 + k)
    return out if np.ndim(out) else float(out)


def kappa_from_lambda(lam):
    """``(1/2 + lambda) / (1/2 - lambda)``, defined for lambda < 1/2."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam >= 0.5):
        raise MathDomainError("lambda >= 1/2: no immersed hypersurface")
    out = (0.5 + lam) / (0.5 - lam)
    return out if np.ndim(out) else float(out)


@dataclass
class ConvexityVerdict:
    kind: str                           # UniformlyWeaklyHC | WeaklyHCOnly | NotWeaklyHC
    kappa0: float | None = None
    witness: int | None = None
    witness_kappas: list | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def convexity_check(kappas) -> ConvexityVerdict:
    """Classify per-node curvature vectors (rows; NaN rows are skipped)."""
    if isinstance(kappas, HypersurfaceMesh):
        if kappas.kappas is None:
            raise ValueError("mesh has no curvatures; call with_curvatures() first")
        kappas = kappas.kappas
    K = np.atleast_2d(np.asarray(kappas, dtype=float))
    rows = np.flatnonzero(np.all(np.isfinite(K), axis=1))
    if len(rows) == 0:
        raise ValueError("no node carries curvatures")
    Kf = K[rows]
    above = Kf > -1.0 + KAPPA_POLE_TOL
    below = Kf < -1.0 - KAPPA_POLE_TOL
    mixed = ~(np.all(above, axis=1) | np.all(below, axis=1))
    if np.any(mixed):
        i = int(rows[np.argmax(mixed)])
        return ConvexityVerdict("NotWeaklyHC", witness=i, witness_kappas=K[i].tolist())
    k0 = float(Kf.min())
    if np.all(above):
        return ConvexityVerdict("UniformlyWeaklyHC", kappa0=k0)
    return ConvexityVerdict("WeaklyHCOnly", kappa0=k0)


@dataclass(eq=False)
class CurvatureReport:
    kappas: np.ndarray                  # (N, n) ascending, NaN where absent
    lambdas: np.ndarray                 # dictionary image of kappas
    mean_curvature: np.ndarray
    convexity: ConvexityVerdict
    max_dictionary_gap: float | None = None

    def to_json(self) -> dict:
        ok = np.all(np.isfinite(self.kappas), axis=1)
        return {
            "nodes_with_curvature": int(ok.sum()),
            "kappa_min": float(np.min(self.kappas[ok])),
            "kappa_max": float(np.max(self.kappas[ok])),
            "mean_curvature_min": float(np.min(self.mean_curvature[ok])),
            "mean_curvature_max": float(np.max(self.mean_curvature[ok])),
            "convexity": self.convexity.to_json(),
            "max_dictionary_gap": self.max_dictionary_gap,
        }


def dictionary_gap(mesh: HypersurfaceMesh) -> np.ndarray:
    """Per-node max |sorted e^{-2t} lambda - sorted lambda_from_kappa(FD kappa)|."""
    if mesh.kappas is None or mesh.lambdas is None:
        raise ValueError("mesh needs both kappas and lambdas")
    ok = np.all(np.isfinite(mesh.kappas), axis=1) & np.all(np.isfinite(mesh.lambdas), axis=1)
    gap = np.full(len(ok), np.nan)
    lk = np.sort(lambda_from_kappa(mesh.kappas[ok]), axis=1)
    gap[ok] = np.max(np.abs(np.sort(mesh.lambdas[ok], axis=1) - lk), axis=1)
    return gap


def curvature_report(mesh: HypersurfaceMesh) -> CurvatureReport:
    if mesh.kappas is None:
        mesh = mesh.with_curvatures()
    K = mesh.kappas
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = 0.5 - 1.0 / (1.0 + K)
    gap = None
    if mesh.lambdas is not None:
        g = dictionary_gap(mesh)
        gap = float(np.nanmax(g)) if np.any(np.isfinite(g)) else None
    return CurvatureReport(K, lam, K.mean(axis=1), convexity_check(K), gap)


@dataclass(eq=False)
class EdgeLengths:
    edges: np.ndarray
    conformal: np.ndarray              # e^{(s_a+s_b)/2} * d_sphere(G_a, G_b)
    pullback: np.ndarray               # sqrt <psi_b - psi_a, psi_b - psi_a>

    @property
    def max_relative_gap(self) -> float:
        ok = self.conformal > 0
        return float(np.max(np.abs(self.pullback[ok] - self.conformal[ok]) / self.conformal[ok]))


def horospherical_metric_samples(mesh: HypersurfaceMesh, tol: float = 1e-12) -> EdgeLengths:
    """Edge lengths of the grid in the horospherical metric, two ways."""
    E = mesh.grid.edges
    a, b = E[:, 0], E[:, 1]
    conf = np.exp(0.5 * (mesh.support[a] + mesh.support[b])) * spherical_distance(
        mesh.gauss[a], mesh.gauss[b])
    d = mesh.psi[b] - mesh.psi[a]
    q = mink_inner(d, d)
    scale = np.maximum(1.0, mesh.psi[a, 0] * mesh.psi[b, 0])
    neg = q < -tol * scale
    if np.any(neg):
        i = int(np.argmax(neg))
        raise MathDomainError(f"timelike psi difference on edge {E[i].tolist()}", witness=E[i].tolist())
    return EdgeLengths(E, conf, np.sqrt(np.maximum(q, 0.0)))


@dataclass
class InjectivityProbe:
    verdict: str                        # NoCollision | Collision
    pair: tuple | None = None
    distance: float | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "pair": list(self.pair) if self.pair else None,
                "distance": self.distance}


def _grid_far(grid: ParameterGrid, i: int, j: int, reach: int) -> bool:
    pi, ii = grid.index_of(i)
    pj, jj = grid.index_of(j)
    if pi is not pj:
        return True
    for ax, (u, v) in enumerate(zip(ii, jj)):
        d = abs(int(u) - int(v))
        if pi.periodic[ax]:
            d = min(d, pi.shape[ax] - d)
        if d > reach:
            return True
    return False


def gauss_injectivity_probe(mesh: HypersurfaceMesh, eps: float = 1e-6,
                            stencil_width: int = 2) -> InjectivityProbe:
    """Look for owned nodes with Gauss images closer than ``eps`` but far apart on the grid.

    "Far" means more than two stencil widths in some grid direction or on a
    different patch. Nodes are scanned in index order and the first pair
    found (ordered by the larger index, then the smaller) is reported.
    """
    G = mesh.gauss
    nodes = np.flatnonzero(mesh.owned & np.all(np.isfinite(G), axis=1))
    keys = np.floor(G[nodes] / eps).astype(np.int64)
    offsets = np.array(np.meshgrid(*[[-1, 0, 1]] * G.shape[1], indexing="ij")).reshape(G.shape[1], -1).T
    table: dict = {}
    reach = 2 * stencil_width
    for node, key in zip(nodes, keys):
        found = None
        for off in offsets:
            for other in table.get(tuple(key + off), ()):
                if spherical_distance(G[node], G[other]) < eps and _grid_far(mesh.grid, other, node, reach):
                    if found is None or other < found:
                        found = other
        if found is not None:
            return InjectivityProbe("Collision", (int(found), int(node)),
                                    float(spherical_distance(G[node], G[found])))
        table.setdefault(tuple(key), []).append(node)
    return InjectivityProbe("NoCollision")
