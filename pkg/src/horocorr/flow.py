"""Geodesic normal flow and the evolution of principal curvatures."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .correspondence import (HypersurfaceMesh, hypersurface_to_metric, horospherical_metric_samples,
                             metric_to_hypersurface)
from .curvature import fd_principal_curvatures
from .errors import MathDomainError, ModelError
from .intersect import EmbeddingVerdict, embeddedness_check


@dataclass(eq=False)
class FlowResult:
    t: float
    mesh: HypersurfaceMesh
    riccati_kappas: np.ndarray | None = None
    fd_kappas: np.ndarray | None = None


def riccati_curvature(kappa, t):
    """``(kappa + tanh t) / (1 + kappa tanh t)``: curvature after flowing a distance t."""
    k = np.asarray(kappa, dtype=float)
    th = np.tanh(np.asarray(t, dtype=float))
    den = 1.0 + k * th
    if np.any(np.abs(den) < 1e-12):
        raise MathDomainError("focal point: 1 + kappa tanh t vanishes")
    out = (k + th) / den
    return out if np.ndim(out) else float(out)


def normal_flow(mesh: HypersurfaceMesh, t: float, fd: bool = False, check: bool = True) -> FlowResult:
    """Move every node a distance ``t`` along the geodesic in direction ``-eta``.

    ``phi^t = phi cosh t - eta sinh t`` and ``eta^t = -phi sinh t + eta cosh t``,
    so ``phi^t - eta^t = e^t (phi - eta)``: the Gauss map is unchanged and
    the support function grows by t. Gauss map and support of the result are
    recomputed from the flowed vectors, not copied.
    """
    if check:
        err = mesh.invariant_errors()
        worst = max(err["phi_phi"], err["eta_eta"], err["phi_eta"])
        if not worst < 1e-6:
            raise ModelError(f"input mesh violates the model invariants (max error {worst:.3g})")
    ch, sh = math.cosh(t), math.sinh(t)
    phi = mesh.phi * ch - mesh.eta * sh
    eta = -mesh.phi * sh + mesh.eta * ch
    gauss, support = hypersurface_to_metric(phi, eta)
    lambdas = None if mesh.lambdas is None else math.exp(-2.0 * t) * mesh.lambdas
    out = replace(mesh, phi=phi, eta=eta, psi=phi - eta, gauss=gauss, support=support,
                  kappas=None, lambdas=lambdas, flow_time=mesh.flow_time + t)
    ric = None if mesh.kappas is None else riccati_curvature(mesh.kappas, t)
    fdk = None
    if fd:
        fdk = fd_principal_curvatures(out)
        out = replace(out, kappas=fdk)
    return FlowResult(float(t), out, ric, fdk)


@dataclass
class FlowInvarianceReport:
    t: float
    gauss_max_diff: float
    support_shift_error: float
    edge_scale_error: float
    kappa_max_gap: float | None
    tolerances: dict
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def flow_invariance_check(base: HypersurfaceMesh, flowed: FlowResult,
                          gauss_tol: float = 1e-12, edge_tol: float = 1e-9,
                          kappa_tol: float = 1e-3) -> FlowInvarianceReport:
    """Compare a flowed mesh with its base: Gauss map, support, edge lengths, curvatures."""
    t = flowed.t
    o = base.owned
    gdiff = float(np.max(np.abs(flowed.mesh.gauss[o] - base.gauss[o])))
    sdiff = float(np.max(np.abs(flowed.mesh.support[o] - (base.support[o] + t))))
    L0 = horospherical_metric_samples(base).conformal
    L1 = horospherical_metric_samples(flowed.mesh).conformal
    pos = L0 > 0
    edge_err = float(np.max(np.abs(L1[pos] / (math.exp(t) * L0[pos]) - 1.0))) if np.any(pos) else 0.0
    gap = None
    if base.kappas is not None:
        measured = flowed.fd_kappas if flowed.fd_kappas is not None else fd_principal_curvatures(flowed.mesh)
        pred = riccati_curvature(base.kappas, t) if flowed.riccati_kappas is None else flowed.riccati_kappas
        d = np.abs(np.sort(measured, axis=1) - np.sort(pred, axis=1))
        ok = np.all(np.isfinite(d), axis=1)
        gap = float(d[ok].max()) if np.any(ok) else None
    passed = gdiff < gauss_tol and edge_err < edge_tol and (gap is None or gap < kappa_tol)
    return FlowInvarianceReport(t, gdiff, sdiff, edge_err, gap,
                                {"gauss": gauss_tol, "edge": edge_tol, "kappa": kappa_tol}, passed)


@dataclass
class EmbeddingSearch:
    first_embedded_t: float | None
    table: list                        # (t, verdict) in lattice order
    monotone: bool

    @property
    def found(self) -> bool:
        return self.first_embedded_t is not None

    def to_json(self) -> dict:
        return {
            "first_embedded_t": self.first_embedded_t,
            "verdict": "Embedded" if self.found else "NoEmbeddedTimeFound",
            "monotone": self.monotone,
            "table": [{"t": t, **v.to_json()} for t, v in self.table],
        }


def find_embedding_time(metric, grid, t_lattice, threads: int | None = None) -> EmbeddingSearch:
    """Build the surface at each lattice time and check it for self-intersections."""
    ts = [float(t) for t in t_lattice]
    if not ts:
        raise ValueError("empty t lattice")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t lattice must be strictly ascending")
    table: list[tuple[float, EmbeddingVerdict]] = []
    for t in ts:
        mesh = metric_to_hypersurface(metric, t, grid, strict=True)
        table.append((t, embeddedness_check(mesh, threads=threads)))
    flags = [v.embedded for _, v in table]
    first = next((t for t, v in table if v.embedded), None)
    monotone = all(b or not a for a, b in zip(flags, flags[1:]))
    return EmbeddingSearch(first, table, monotone)


def rotational_symmetry_error(mesh: HypersurfaceMesh, axis, steps=None) -> float:
    """Largest mismatch between the ball vertex set and its rotations about ``axis``.

    For a polar grid with ``N`` longitudes the rotations by multiples of
    ``2 pi / N`` map the sampled vertex set to itself; each rotated vertex is
    matched to its nearest neighbour.
    """
    from scipy.spatial import cKDTree

    from .lorentz import to_poincare_ball

    o = mesh.owned
    B = to_poincare_ball(mesh.phi[o])
    patch = mesh.grid.patches[0]
    N = patch.shape[1]
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    tree = cKDTree(B)
    worst = 0.0
    for k in (steps if steps is not None else range(1, N)):
        a = 2 * math.pi * k / N
        # Rodrigues rotation about the axis
        Bx = np.cross(axis, B)
        R = B * math.cos(a) + Bx * math.sin(a) + np.outer(B @ axis, axis) * (1 - math.cos(a))
        d, _ = tree.query(R)
        worst = max(worst, float(d.max()))
    return worst
