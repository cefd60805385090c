"""The acceptance suite as plain functions.

Each check returns a :class:`CheckResult` whose ``details`` hold the measured
quantities next to the tolerances they were compared with. ``run_checks``
selects checks by tag.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .conformal import (boundary_divergence_scan, completeness_probe,
                        gradient_bound_constants, ode_blowup_time, ode_comparison_solution,
                        p_tensor)
from .correspondence import (dictionary_gap, hypersurface_to_metric, metric_to_hypersurface,
                             min_flow_time)
from .errors import DegenerateImmersionWarning
from .flow import flow_invariance_check, normal_flow, riccati_curvature, rotational_symmetry_error
from .intersect import embeddedness_check
from .lorentz import mink_inner
from .sphere import normalize, tangent_frame

MODEL_TOL = 1e-9
SEED = 20240601


@dataclass
class CheckResult:
    id: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id}: {self.title}"

    def to_json(self, timings: bool = False) -> dict:
        d = {"id": self.id, "title": self.title, "passed": self.passed, "details": self.details}
        if timings:
            d["seconds"] = round(self.seconds, 3)
        return d


def _entries(n):
    return [catalog.make_constant(0.0, n), catalog.make_flat_punctured(n=n), catalog.make_cylindric(n=n)]


def _times(entry, grid):
    mt = min_flow_time(entry.metric, grid, 0.05)
    return [round(mt + 0.1, 10), 1.0, 3.0]


def _invariants(n, resolution):
    worst = {}
    ok = True
    for e in _entries(n):
        g = e.grid(resolution)
        for t in _times(e, g):
            m = metric_to_hypersurface(e.metric, t, g)
            err = m.invariant_errors()
            key = f"{e.id}@t={t:g}"
            worst[key] = max(err["phi_phi"], err["eta_eta"], err["phi_eta"], err["phi_psi"])
            ok &= worst[key] < MODEL_TOL
    return ok, {"max_error": worst, "tolerance": MODEL_TOL, "resolution": [int(r) for r in np.atleast_1d(resolution)]}


def check_model_invariants() -> CheckResult:
    ok, d = _invariants(2, (64, 64))
    return CheckResult("c1", "model invariants on catalog meshes", ok, d)


def _sphere_kappas(n, resolution, tol):
    e = catalog.make_constant(0.0, n)
    g = e.grid(resolution)
    out, ok = {}, True
    for t in (1.0, 2.0):
        m = metric_to_hypersurface(e.metric, t, g, curvatures=True)
        K = m.kappas[g.owned]
        good = np.all(np.isfinite(K), axis=1)
        err = float(np.max(np.abs(K[good] - 1.0 / math.tanh(t))))
        out[f"t={t:g}"] = {"max_error": err, "nodes": int(good.sum()), "expected": 1.0 / math.tanh(t)}
        ok &= err < tol and good.sum() > 0
    out["tolerance"] = tol
    return ok, out


def check_geodesic_sphere() -> CheckResult:
    ok, d = _sphere_kappas(2, (64, 64), 1e-3)
    return CheckResult("c2", "geodesic spheres have curvature coth t", ok, d)


def check_dictionary() -> CheckResult:
    tol = 1e-3
    details, ok = {"tolerance": tol, "min_ratio": 3.0}, True
    for e in (catalog.make_flat_punctured(), catalog.make_cylindric()):
        g1 = e.grid((64, 64))
        g2 = e.grid((128, 128))
        mt = min_flow_time(e.metric, g1, 0.05)
        for t in (round(mt + 0.1, 10), 1.0):
            gaps = []
            for g in (g1, g2):
                m = metric_to_hypersurface(e.metric, t, g, curvatures=True)
                gaps.append(float(np.nanmax(dictionary_gap(m))))
            ratio = gaps[0] / gaps[1] if gaps[1] > 0 else math.inf
            details[f"{e.id}@t={t:g}"] = {"gap_64": gaps[0], "gap_128": gaps[1], "ratio": ratio}
            ok &= gaps[0] < tol and ratio >= 3.0
    return CheckResult("c3", "curvature dictionary agrees with FD curvatures", ok, details)


def check_liouville_bernstein() -> CheckResult:
    e = catalog.make_flat_punctured()
    p = np.asarray(e.expected["horosphere_center"])
    rng = np.random.default_rng(SEED)
    pts = []
    while len(pts) < 500:
        x = normalize(rng.normal(size=3))
        if e.metric.domain.contains(x, 1e-3):
            pts.append(x)
    P = p_tensor(e.metric, np.array(pts)).matrix
    max_p = float(np.max(np.abs(P)))

    g = e.grid((64, 64))
    m = metric_to_hypersurface(e.metric, 0.0, g, curvatures=True)
    lp = np.concatenate([[1.0], p])
    level = mink_inner(m.phi[g.owned], lp)
    spread = float(level.max() - level.min())
    K = m.kappas[g.owned]
    K = K[np.all(np.isfinite(K), axis=1)]
    H = K.mean(axis=1)
    h_err = float(np.max(np.abs(H - 1.0)))
    flow_err = {}
    for s in (1.0, 2.0):
        fk = normal_flow(m, s, fd=True).fd_kappas[g.owned]
        fk = fk[np.all(np.isfinite(fk), axis=1)]
        flow_err[f"s={s:g}"] = float(np.max(np.abs(fk - 1.0)))
    ok = max_p < 1e-9 and spread < 1e-9 and h_err < 1e-3 and max(flow_err.values()) < 1e-3
    return CheckResult("c4", "flat punctured metric gives a horosphere", ok, {
        "max_abs_P": max_p, "P_tolerance": 1e-9, "samples": 500,
        "horosphere_level_spread": spread, "level_tolerance": 1e-9,
        "mean_curvature_max_error": h_err, "flowed_kappa_max_error": flow_err, "kappa_tolerance": 1e-3,
    })


def check_riccati() -> CheckResult:
    e = catalog.make_constant(0.0)
    g = e.grid((64, 64))
    base = metric_to_hypersurface(e.metric, 1.0, g, curvatures=True)
    fr = normal_flow(base, 1.0, fd=True)
    pred = riccati_curvature(1.0 / math.tanh(1.0), 1.0)
    closed = abs(pred - 1.0 / math.tanh(2.0))
    K = fr.fd_kappas[g.owned]
    K = K[np.all(np.isfinite(K), axis=1)]
    fd_err = float(np.max(np.abs(K - pred)))
    rng = np.random.default_rng(SEED)
    k = rng.uniform(-0.99, 10.0, 1000)
    s = rng.uniform(0.0, 3.0, 1000)
    t = rng.uniform(0.0, 3.0, 1000)
    semi = float(np.max(np.abs(riccati_curvature(riccati_curvature(k, s), t) - riccati_curvature(k, s + t))))
    ok = fd_err < 1e-3 and closed < 1e-12 and semi < 1e-12
    return CheckResult("c5", "Riccati evolution of curvatures", ok, {
        "fd_vs_riccati": fd_err, "fd_tolerance": 1e-3, "riccati_vs_coth2": closed,
        "semigroup_max_error": semi, "semigroup_tolerance": 1e-12, "triples": 1000,
    })


def check_flow_invariance() -> CheckResult:
    out, ok = {"gauss_tolerance": 1e-12, "edge_tolerance": 1e-9}, True
    for e, t0 in ((catalog.make_constant(0.0), 1.0), (catalog.make_flat_punctured(), 0.5),
                  (catalog.make_cylindric(), 1.0)):
        g = e.grid((64, 64))
        base = metric_to_hypersurface(e.metric, t0, g)
        for s in (0.5, 1.0, 2.0):
            rep = flow_invariance_check(base, normal_flow(base, s))
            out[f"{e.id}@t={t0:g}+{s:g}"] = {"gauss": rep.gauss_max_diff, "edge": rep.edge_scale_error}
            ok &= rep.gauss_max_diff < 1e-12 and rep.edge_scale_error < 1e-9
    return CheckResult("c6", "Gauss map and horospherical metric under the flow", ok, out)


def _meridian(p, thetas):
    e = tangent_frame(p)[:, 0]
    return normalize(np.cos(thetas)[:, None] * p + np.sin(thetas)[:, None] * e)


def check_beta_divergence() -> CheckResult:
    out, ok = {"threshold": 1e6}, True
    flat = catalog.make_flat_punctured()
    cyl = catalog.make_cylindric()
    for e in (flat, cyl):
        dom = e.metric.domain
        for i, b in enumerate(np.asarray(e.expected["beta_diverges_at"])):
            seq = dom.approach_sequence(b, 20, 0.5)
            scan = boundary_divergence_scan(e.metric, b, seq)
            out[f"{e.id}:end{i}"] = {"verdict": scan.verdict, "final_beta": scan.values[-1]}
            ok &= scan.verdict == "Diverging"
    p = np.asarray(flat.expected["horosphere_center"])
    th = 2.0 ** (-np.arange(4, 161) / 4.0)
    sums = completeness_probe(flat.metric, _meridian(p, th))
    out["flat_length"] = {"value": float(sums[-1]), "bound": 1e3, "theta_end": float(th[-1])}
    ok &= sums[-1] > 1e3
    p = np.asarray(cyl.expected["rotation_axis"])
    th = np.concatenate([np.arange(math.pi / 2, 0.1, -0.05), np.geomspace(0.1, 1e-3, 60)])
    sums = completeness_probe(cyl.metric, _meridian(p, th))
    out["cylindric_length"] = {"value": float(sums[-1]), "bound": 5.0, "theta_end": float(th[-1])}
    ok &= sums[-1] > 5.0
    return CheckResult("c7", "beta diverges and catalog metrics are complete", ok, out)


def _rk_oracle(A, y0, t_end):
    from scipy.integrate import solve_ivp

    sol = solve_ivp(lambda t, y: y * y + A, (0.0, t_end), [y0], method="DOP853",
                    rtol=1e-13, atol=1e-13)
    return float(sol.y[0, -1])


def _gradient_constants(ns):
    out, ok = {"identity_tolerance": 1e-9, "ode_tolerance": 1e-6}, True
    for n in ns:
        for C, C0 in ((1.0, 1.0), (2.0, 1.0), (1.0, 5.0)):
            gc = gradient_bound_constants(C, C0, n)
            sa = math.sqrt(gc.A)
            d_err = abs(gc.delta - (math.pi / 2 - math.atan(C / sa)) / (2 * sa))
            y_err = abs(gc.Ybar - sa * math.tan(math.pi / 4 + 0.5 * math.atan(C / sa)))
            k_err = abs(gc.K - max(1.0, math.sqrt(n) / 2))
            ineq = C0 * C * math.exp(2 * gc.K * gc.delta * gc.Ybar) + 1 <= gc.A
            T = ode_blowup_time(gc.A, C)
            t80 = 0.8 * T
            ode_err = abs(ode_comparison_solution(gc.A, C, t80) - _rk_oracle(gc.A, C, t80))
            out[f"n={n},C={C:g},C0={C0:g}"] = {
                "A": gc.A, "delta_err": d_err, "Ybar_err": y_err, "inequality": ineq,
                "ode_err_at_80pct": ode_err}
            ok &= d_err < 1e-9 and y_err < 1e-9 and k_err == 0 and ineq and ode_err < 1e-6
    return ok, out


def check_gradient_constants() -> CheckResult:
    ok, d = _gradient_constants((2, 3))
    return CheckResult("c8", "gradient-bound constants and comparison ODE", ok, d)


def check_embeddedness() -> CheckResult:
    e = catalog.make_cylindric()
    g = e.grid((128, 64))
    m = metric_to_hypersurface(e.metric, 3.0, g)
    runs = {th: embeddedness_check(m, threads=th) for th in (1, 4)}
    fx = catalog.make_selfintersecting_fixture()
    fruns = {th: embeddedness_check(fx.vertices, fx.triangles, threads=th) for th in (1, 4)}
    f1 = fruns[1]
    dist = fx.distance_to_crossing(f1.point) if f1.point is not None else math.inf
    same = (all(v.verdict == runs[1].verdict for v in runs.values())
            and all(v.verdict == f1.verdict and v.witness == f1.witness for v in fruns.values()))
    rot = rotational_symmetry_error(m, e.expected["rotation_axis"])
    ok = runs[1].embedded and f1.verdict == "SelfIntersecting" and dist < 1e-6 and same and rot < 1e-9
    return CheckResult("c9", "embeddedness of the cylindric surface, fixture detected", ok, {
        "cylindric_t3": runs[1].verdict, "pairs_tested": runs[1].pairs_tested,
        "fixture": f1.verdict, "fixture_witness": list(f1.witness) if f1.witness else None,
        "witness_distance": dist, "witness_tolerance": 1e-6,
        "thread_independent": same, "rotation_error": rot, "rotation_tolerance": 1e-9,
    })


def check_round_trip() -> CheckResult:
    out, ok = {"tolerance": 1e-9}, True
    for e in _entries(2):
        g = e.grid((64, 64))
        o = g.owned
        for t in _times(e, g):
            m = metric_to_hypersurface(e.metric, t, g)
            gauss, support = hypersurface_to_metric(m.phi[o], m.eta[o])
            x = g.points[o]
            s_err = float(np.max(np.abs(support - (e.metric.rho.value(x) + t))))
            g_err = float(np.max(np.abs(gauss - x)))
            out[f"{e.id}@t={t:g}"] = {"support": s_err, "gauss": g_err}
            ok &= s_err < 1e-9 and g_err < 1e-9
    return CheckResult("c10", "surface to metric round trip", ok, out)


def check_dimension_three() -> CheckResult:
    ok1, d1 = _invariants(3, 16)
    ok2, d2 = _sphere_kappas(3, 24, 5e-3)
    ok8, d8 = _gradient_constants((3,))
    return CheckResult("c11", "n = 3: invariants, sphere curvature, constants", ok1 and ok2 and ok8,
                       {"invariants": d1, "sphere": d2, "constants": d8})


CHECKS = {
    "c1": (check_model_invariants, ("model", "invariants")),
    "c2": (check_geodesic_sphere, ("sphere", "curvature")),
    "c3": (check_dictionary, ("dictionary", "curvature")),
    "c4": (check_liouville_bernstein, ("flat", "horosphere")),
    "c5": (check_riccati, ("riccati", "flow")),
    "c6": (check_flow_invariance, ("flow",)),
    "c7": (check_beta_divergence, ("beta", "completeness")),
    "c8": (check_gradient_constants, ("constants", "ode")),
    "c9": (check_embeddedness, ("embedding",)),
    "c10": (check_round_trip, ("roundtrip",)),
    "c11": (check_dimension_three, ("n3",)),
}


def select(tag: str | None = None) -> list[str]:
    if not tag:
        return list(CHECKS)
    return [k for k, (_, tags) in CHECKS.items() if tag == k or tag in tags]


def run_check(key: str) -> CheckResult:
    fn = CHECKS[key][0]
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateImmersionWarning)
        try:
            res = fn()
        except Exception as exc:  # a crash is a failed criterion, reported as such
            res = CheckResult(key, fn.__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(tag: str | None = None) -> list[CheckResult]:
    return [run_check(k) for k in select(tag)]
