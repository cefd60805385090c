"""Conformal metrics ``e^{2 rho} g`` on domains of the round sphere.

The symmetric 2-tensor

    P = -Hess rho + d rho (x) d rho - 1/2 (|grad rho|^2 - 1) g

is returned by :func:`p_tensor` both as components in a round-orthonormal
tangent frame (``matrix``) and through its eigenvalues relative to the
conformal metric itself (``eigenvalues``), which are the ``lambda_i`` that
enter the curvature dictionary. The two differ by the factor ``e^{-2 rho}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import DomainSpec, ParameterGrid
from .errors import DomainError, MathDomainError
from .sphere import ScalarFieldOnSphere, spherical_distance, tangent_frame

BETA_THRESHOLD = 1e6


@dataclass(eq=False)
class ConformalMetric:
    domain: DomainSpec
    rho: ScalarFieldOnSphere
    label: str = ""

    @property
    def dim(self) -> int:
        return self.domain.dim

    def check_inside(self, x, margin: float = 0.0):
        x = np.asarray(x, dtype=float)
        inside = self.domain.contains(x, margin)
        if not np.all(inside):
            bad = np.argwhere(~np.atleast_1d(inside))[0]
            raise DomainError(f"point {np.atleast_2d(x)[bad[0]]} lies outside the domain of {self.label!r}")


@dataclass(eq=False)
class PTensorSample:
    point: np.ndarray
    matrix: np.ndarray          # components in a round-orthonormal frame
    eigenvalues: np.ndarray     # relative to e^{2 rho} g, ascending
    round_eigenvalues: np.ndarray
    frame: np.ndarray


def _p_matrix(metric: ConformalMetric, x, frame):
    rho = metric.rho
    g = rho.gradient(x)
    gf = np.einsum("...a,...ai->...i", g, frame)
    H = rho.hessian(x, frame)
    n = frame.shape[-1]
    g2 = np.sum(g * g, axis=-1)
    P = -H + gf[..., :, None] * gf[..., None, :] - 0.5 * (g2 - 1.0)[..., None, None] * np.eye(n)
    return 0.5 * (P + np.swapaxes(P, -1, -2))


def p_tensor(metric: ConformalMetric, x, frame=None, check_domain: bool = True) -> PTensorSample:
    x = np.asarray(x, dtype=float)
    if check_domain:
        metric.check_inside(x)
    if frame is None:
        frame = tangent_frame(x)
    P = _p_matrix(metric, x, frame)
    lam_round = np.linalg.eigvalsh(P)
    scale = np.exp(-2.0 * metric.rho.value(x))
    lam = lam_round * scale[..., None]
    return PTensorSample(x, P, lam, lam_round, frame)


def p_eigenvalues_rescaled(metric: ConformalMetric, x, t: float) -> np.ndarray:
    """Eigenvalues of P relative to ``e^{2t} e^{2 rho} g``: ``e^{-2t} lambda_i``."""
    return math.exp(-2.0 * t) * p_tensor(metric, x).eigenvalues


def beta(metric: ConformalMetric, x, check_domain: bool = True) -> np.ndarray:
    """``e^{2 rho} + |grad rho|^2``."""
    x = np.asarray(x, dtype=float)
    if check_domain:
        metric.check_inside(x)
    g = metric.rho.gradient(x)
    b = np.exp(2.0 * metric.rho.value(x)) + np.sum(g * g, axis=-1)
    return b if np.ndim(b) else float(b)


@dataclass
class RealizabilityReport:
    sup_abs: float
    min_lambda: float
    max_lambda: float
    samples: int
    bound: float
    two_sided: bool
    verdict: str                       # "WithinBound" | "Exceeds"
    witness: list | None = None
    at_bound: bool = False

    def to_json(self) -> dict:
        return dict(self.__dict__)


def realizability_scan(metric: ConformalMetric, grid: ParameterGrid | np.ndarray,
                       bound: float, two_sided: bool = True) -> RealizabilityReport:
    """Extremes of the P-eigenvalues over a grid compared with ``bound``.

    With ``two_sided=False`` only ``lambda <= bound`` is tested (P bounded
    from above); otherwise ``|lambda| <= bound``.
    """
    pts = grid.owned_points() if isinstance(grid, ParameterGrid) else np.atleast_2d(grid)
    if len(pts) == 0:
        raise ValueError("empty grid")
    lam = p_tensor(metric, pts).eigenvalues
    lo, hi = lam[:, 0], lam[:, -1]
    size = np.maximum(np.abs(lo), np.abs(hi)) if two_sided else hi
    i = int(np.argmax(size))
    top = float(size[i])
    exceeds = top > bound * (1 + 1e-12)
    return RealizabilityReport(
        sup_abs=float(np.max(np.maximum(np.abs(lo), np.abs(hi)))),
        min_lambda=float(lo.min()), max_lambda=float(hi.max()),
        samples=len(pts), bound=float(bound), two_sided=two_sided,
        verdict="Exceeds" if exceeds else "WithinBound",
        witness=pts[i].tolist() if exceeds else None,
        at_bound=bool(abs(top - bound) <= 1e-12 * max(1.0, abs(bound))),
    )


@dataclass
class DivergenceScan:
    values: list
    verdict: str                       # "Diverging" | "Inconclusive"
    threshold: float
    note: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def boundary_divergence_scan(metric: ConformalMetric, boundary_point, approach,
                             threshold: float = BETA_THRESHOLD, tail: int = 5) -> DivergenceScan:
    """beta along points approaching a boundary point.

    The verdict is ``Diverging`` when the last ``tail`` values increase
    strictly and the final one exceeds ``threshold``. This is numerical
    evidence, nothing more.
    """
    if not metric.domain.has_boundary:
        return DivergenceScan([], "Inconclusive", threshold, "domain has no boundary")
    approach = np.atleast_2d(np.asarray(approach, dtype=float))
    metric.check_inside(approach)
    vals = np.atleast_1d(beta(metric, approach))
    d = spherical_distance(approach, np.asarray(boundary_point, dtype=float))
    note = ""
    if len(d) > 1 and not np.all(np.diff(d) < 0):
        note = "approach sequence is not monotone towards the boundary point"
    k = min(tail, len(vals))
    tail_vals = vals[-k:]
    increasing = bool(np.all(np.diff(tail_vals) > 0))
    diverging = increasing and bool(vals[-1] > threshold)
    return DivergenceScan(vals.tolist(), "Diverging" if diverging else "Inconclusive",
                          threshold, note)


def completeness_probe(metric: ConformalMetric, curve) -> np.ndarray:
    """Partial sums of the conformal length of a polygonal curve on the sphere.

    Each segment contributes ``e^{rho(midpoint)}`` times its spherical length.
    """
    curve = np.atleast_2d(np.asarray(curve, dtype=float))
    metric.check_inside(curve)
    seg = spherical_distance(curve[:-1], curve[1:])
    if np.any(seg >= 0.1):
        raise ValueError("consecutive curve points must be closer than 0.1 rad")
    mid = curve[:-1] + curve[1:]
    mid = mid / np.linalg.norm(mid, axis=-1, keepdims=True)
    metric.check_inside(mid)
    return np.cumsum(np.exp(metric.rho.value(mid)) * seg)


@dataclass(frozen=True)
class GradientBoundConstants:
    """Constants of the ODE-comparison argument for the gradient of rho.

    ``delta`` is the radius of the balls on which ``|grad rho| <= K * Ybar``
    and ``A`` the constant in ``Y' = Y^2 + A``.
    """

    C: float
    C0: float
    n: int
    K: float
    A: float
    delta: float
    Ybar: float
    search_steps: int = field(default=0, compare=False)

    def residual(self) -> float:
        """``A - (C0 C e^{2 K delta Ybar} + 1)``; non-negative for admissible A."""
        return self.A - (self.C0 * self.C * math.exp(2 * self.K * self.delta * self.Ybar) + 1.0)

    def check(self, tol: float = 1e-12) -> bool:
        d, y = _delta_ybar(self.A, self.C)
        return (abs(self.delta - d) <= tol and abs(self.Ybar - y) <= tol * max(1.0, y)
                and self.residual() >= 0)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("C", "C0", "n", "K", "A", "delta", "Ybar")}


def _delta_ybar(A: float, C: float) -> tuple[float, float]:
    sa = math.sqrt(A)
    a = math.atan(C / sa)
    return (math.pi / 2 - a) / (2 * sa), sa * math.tan(math.pi / 4 + a / 2)


def _admissible(A, C, C0, K):
    d, y = _delta_ybar(A, C)
    lhs = C0 * C * math.exp(2 * K * d * y) + 1.0
    return lhs <= A


def gradient_bound_constants(C: float, C0: float, n: int, rtol: float = 1e-6,
                             cap: float = 1e300) -> GradientBoundConstants:
    """Smallest admissible ``A`` (to relative ``rtol``) by doubling then bisection.

    ``A`` is admissible when ``C0 C exp(2 K delta Ybar) + 1 <= A``. The
    left-hand side decreases in A towards ``C0 C e^{K pi/2} + 1`` so the
    admissible set is a half-line and bisection finds its end.
    """
    if not (C > 0 and C0 > 0):
        raise ValueError("C and C0 must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    K = max(1.0, math.sqrt(n) / 2.0)
    lo = C0 * C + 1.0
    hi = 2.0 * lo
    steps = 0
    while not _admissible(hi, C, C0, K):
        lo = hi
        hi *= 2.0
        steps += 1
        if hi > cap:
            raise MathDomainError(f"no admissible A below {cap:g} for C={C}, C0={C0}")
    if _admissible(lo, C, C0, K):
        hi = lo
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _admissible(mid, C, C0, K):
            hi = mid
        else:
            lo = mid
        steps += 1
    d, y = _delta_ybar(hi, C)
    return GradientBoundConstants(C, C0, n, K, hi, d, y, steps)


def ode_blowup_time(A: float, y0: float) -> float:
    sa = math.sqrt(A)
    return (math.pi / 2 - math.atan(y0 / sa)) / sa


def ode_comparison_solution(A: float, y0: float, t):
    """Solution of ``Y' = Y^2 + A, Y(0) = y0``: ``sqrt(A) tan(sqrt(A) t + atan(y0/sqrt(A)))``."""
    if A <= 0:
        raise ValueError("A must be positive")
    sa = math.sqrt(A)
    arg = sa * np.asarray(t, dtype=float) + math.atan(y0 / sa)
    if np.any(arg >= math.pi / 2):
        raise MathDomainError("t reaches the blow-up time of the comparison ODE")
    out = sa * np.tan(arg)
    return out if np.ndim(out) else float(out)
