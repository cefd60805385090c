"""Command line interface: ``horocorr {build|analyze|flow|verify|catalog}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 math-domain error (e.g. eigenvalues reaching 1/2).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import (get_entry, list_entries, make_constant, make_cylindric,
                      make_flat_punctured)
from .conformal import boundary_divergence_scan, realizability_scan
from .correspondence import curvature_report, metric_to_hypersurface
from .errors import DegenerateImmersionWarning, DomainError, MathDomainError
from .flow import find_embedding_time, flow_invariance_check, normal_flow
from .intersect import embeddedness_check
from .io import CONFIG_SCHEMA, REPORT_SCHEMA, dumps, write_mesh
from .verification import run_checks, select

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_MATH = 0, 1, 2, 3

ANALYSES = ("curvature", "convexity", "realizability", "beta_scan", "flow_invariance", "embeddedness")
DEFAULT_TOLERANCES = {"kappa": 1e-3, "model": 1e-9, "gauss": 1e-12, "edge": 1e-9, "beta_threshold": 1e6}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    metric: str = "constant:0"
    n: int = 2
    resolution: tuple | None = None
    margin: float | None = None
    t: list = field(default_factory=lambda: [1.0])
    analyses: list = field(default_factory=lambda: ["curvature", "convexity"])
    bound: float = 0.5
    out: str | None = None
    report: str | None = None
    threads: int | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    timings: bool = False

    def echo(self) -> dict:
        d = {k: getattr(self, k) for k in ("metric", "n", "margin", "t", "analyses", "bound")}
        d["resolution"] = list(self.resolution) if self.resolution else None
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        d["schema"] = CONFIG_SCHEMA
        return d


def parse_resolution(text) -> tuple:
    if isinstance(text, (list, tuple)):
        vals = [int(v) for v in text]
    else:
        try:
            vals = [int(v) for v in str(text).lower().split("x")]
        except ValueError:
            raise ConfigError(f"bad resolution {text!r}; use e.g. 64x64") from None
    if min(vals) < 4:
        raise ConfigError("resolution must be at least 4 per direction")
    return tuple(vals)


def parse_times(text) -> list:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad time or lattice {text!r}") from None


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if data.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {data.get('schema')!r}")
        for key, val in data.items():
            if key == "schema":
                continue
            if key == "tolerances":
                cfg.tolerances.update(val)
            elif key == "resolution":
                cfg.resolution = parse_resolution(val)
            elif key == "t":
                cfg.t = parse_times(val)
            elif hasattr(cfg, key):
                setattr(cfg, key, val)
            else:
                raise ConfigError(f"unknown config key {key!r}")
    # flags override the file
    for key in ("metric", "n", "margin", "bound", "out", "report", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "resolution", None):
        cfg.resolution = parse_resolution(args.resolution)
    if getattr(args, "t", None) is not None:
        cfg.t = parse_times(args.t)
    if getattr(args, "analyses", None):
        cfg.analyses = [a.strip() for a in args.analyses.split(",") if a.strip()]
    if getattr(args, "beta_threshold", None) is not None:
        cfg.tolerances["beta_threshold"] = args.beta_threshold
    if getattr(args, "timings", False):
        cfg.timings = True
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads must be positive")
    if cfg.n < 2:
        raise ConfigError("n must be at least 2")
    if cfg.margin is not None and cfg.margin < 0:
        raise ConfigError("margin must be non-negative")
    bad = [a for a in cfg.analyses if a not in ANALYSES]
    if bad:
        raise ConfigError(f"unknown analyses {bad}; choose from {list(ANALYSES)}")
    if not cfg.t:
        raise ConfigError("no flow time given")
    return cfg


_INLINE = {
    "constant": (make_constant, {"c"}),
    "flat-punctured": (make_flat_punctured, {"p", "margin"}),
    "cylindric": (make_cylindric, {"p", "q", "margin"}),
}


def _entry(cfg):
    """Catalog entry from an id string or an inline ``{"kind", "parameters"}`` object."""
    try:
        if isinstance(cfg.metric, dict):
            kind = cfg.metric.get("kind")
            params = dict(cfg.metric.get("parameters") or {})
            if kind not in _INLINE:
                raise KeyError(f"unknown metric kind {kind!r}")
            make, allowed = _INLINE[kind]
            extra = set(params) - allowed
            if extra:
                raise ValueError(f"unknown parameters {sorted(extra)} for {kind}")
            return make(n=cfg.n, **params)
        return get_entry(str(cfg.metric), cfg.n)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _grid(entry, cfg):
    try:
        return entry.grid(cfg.resolution, cfg.margin)
    except (ValueError, DomainError) as exc:
        raise ConfigError(str(exc)) from None


def _report(command, cfg, results, expectations, timings=None) -> dict:
    rep = {
        "schema": REPORT_SCHEMA,
        "tool": "horocorr",
        "version": __version__,
        "command": command,
        "config": cfg.echo(),
        "results": results,
        "expectations": expectations,
        "passed": all(e["passed"] for e in expectations),
    }
    if timings is not None:
        rep["timings"] = timings
    return rep


def _emit(cfg, rep) -> None:
    text = dumps(rep)
    if cfg.report:
        Path(cfg.report).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    cfg = load_config(args)
    entry = _entry(cfg)
    if cfg.n != 2:
        raise ConfigError("OBJ export needs n = 2")
    grid = _grid(entry, cfg)
    t = cfg.t[0]
    mesh = metric_to_hypersurface(entry.metric, t, grid, strict=True, curvatures=True)
    out = cfg.out or f"{entry.id.replace(':', '_')}_t{t:g}.obj"
    obj, side = write_mesh(out, mesh)
    print(f"wrote {obj} and {side}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = load_config(args)
    entry = _entry(cfg)
    grid = _grid(entry, cfg)
    tol = cfg.tolerances
    t = cfg.t[0]
    results, expectations, timings = {}, [], {}
    mesh = None
    needs_mesh = {"curvature", "convexity", "flow_invariance", "embeddedness"} & set(cfg.analyses)
    if needs_mesh:
        mesh = metric_to_hypersurface(entry.metric, t, grid, strict=True, curvatures=True)
    for name in cfg.analyses:
        t0 = time.perf_counter()
        if name in ("curvature", "convexity"):
            if "curvature" in results:
                continue
            cr = curvature_report(mesh)
            results["curvature"] = cr.to_json()
            if cr.max_dictionary_gap is not None:
                expectations.append({"name": "dictionary_gap", "value": cr.max_dictionary_gap,
                                     "tolerance": tol["kappa"],
                                     "passed": cr.max_dictionary_gap < tol["kappa"]})
            expectations.append({"name": "convexity", "value": cr.convexity.kind,
                                 "passed": cr.convexity.kind == "UniformlyWeaklyHC"})
        elif name == "realizability":
            rep = realizability_scan(entry.metric, grid, cfg.bound)
            d = rep.to_json()
            if rep.at_bound:
                d["flag"] = "boundary of bound"
            results["realizability"] = d
        elif name == "beta_scan":
            scans = []
            for b in entry.metric.domain.boundary_points():
                seq = entry.metric.domain.approach_sequence(b)
                scans.append(boundary_divergence_scan(entry.metric, b, seq, tol["beta_threshold"]))
            if not scans:
                scans.append(boundary_divergence_scan(entry.metric, None, []))
            results["beta_scan"] = [s.to_json() for s in scans]
        elif name == "flow_invariance":
            fr = normal_flow(mesh, 1.0, fd=True)
            rep = flow_invariance_check(mesh, fr, tol["gauss"], tol["edge"], tol["kappa"])
            results["flow_invariance"] = rep.to_json()
            expectations.append({"name": "flow_invariance", "passed": rep.passed})
        elif name == "embeddedness":
            v = embeddedness_check(mesh, threads=cfg.threads)
            results["embeddedness"] = v.to_json()
        timings[name] = round(time.perf_counter() - t0, 3)
    _emit(cfg, _report("analyze", cfg, results, expectations, timings if cfg.timings else None))
    return EXIT_OK


def cmd_flow(args) -> int:
    cfg = load_config(args)
    entry = _entry(cfg)
    grid = _grid(entry, cfg)
    lattice = cfg.t
    tol = cfg.tolerances
    results, expectations = {}, []
    if cfg.n == 2:
        search = find_embedding_time(entry.metric, grid, lattice, threads=cfg.threads)
        results["embedding"] = search.to_json()
        expectations.append({"name": "monotone_verdicts", "passed": search.monotone})
    base = metric_to_hypersurface(entry.metric, lattice[0], grid, strict=True, curvatures=True)
    per_t = []
    for t in lattice:
        fr = normal_flow(base, t - lattice[0], fd=True)
        d = np.abs(np.sort(fr.fd_kappas, axis=1) - np.sort(fr.riccati_kappas, axis=1))
        ok = np.all(np.isfinite(d), axis=1)
        gap = float(d[ok].max()) if np.any(ok) else math.nan
        per_t.append({"t": t, "riccati_vs_fd": gap})
        expectations.append({"name": f"riccati_vs_fd@t={t:g}", "value": gap,
                             "tolerance": tol["kappa"], "passed": gap < tol["kappa"]})
        if args.obj_dir and cfg.n == 2:
            Path(args.obj_dir).mkdir(parents=True, exist_ok=True)
            write_mesh(Path(args.obj_dir) / f"{entry.id.replace(':', '_')}_t{t:g}.obj", fr.mesh)
    results["riccati"] = per_t
    _emit(cfg, _report("flow", cfg, results, expectations))
    return EXIT_OK


def cmd_verify(args) -> int:
    keys = select(args.filter)
    if not keys:
        raise ConfigError(f"no acceptance check matches {args.filter!r}")
    results = run_checks(args.filter)
    if args.json:
        sys.stdout.write(dumps({"schema": REPORT_SCHEMA, "version": __version__, "command": "verify",
                                "checks": [r.to_json(args.timings) for r in results],
                                "passed": all(r.passed for r in results)}))
    else:
        for r in results:
            print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failure: {failed[0].id} ({failed[0].title})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        sys.stdout.write(dumps({"entries": list_entries()}))
        return EXIT_OK
    if not args.id:
        raise ConfigError("catalog show needs an id")
    try:
        entry = get_entry(args.id, args.n or 2)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    sys.stdout.write(dumps(entry.to_json()))
    return EXIT_OK


def _common(p):
    p.add_argument("--config", help="JSON config file (schema config/v1)")
    p.add_argument("--metric", help="catalog id, e.g. constant:0, flat-punctured, cylindric")
    p.add_argument("--n", type=int, help="sphere dimension (default 2)")
    p.add_argument("--resolution", help="grid resolution, e.g. 64x64")
    p.add_argument("--margin", type=float, help="distance kept from the domain boundary")
    p.add_argument("--threads", type=int, help="worker threads (default: $HOROCORR_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horocorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"horocorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a surface and write OBJ + sidecar JSON")
    _common(p)
    p.add_argument("--t", help="flow time")
    p.add_argument("--out", help="OBJ output path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="curvature, convexity, realizability and beta analyses")
    _common(p)
    p.add_argument("--t", help="flow time")
    p.add_argument("--analyses", help=f"comma separated subset of {','.join(ANALYSES)}")
    p.add_argument("--bound", type=float, help="realizability bound on |lambda|")
    p.add_argument("--beta-threshold", type=float, dest="beta_threshold")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("flow", help="flow over a t lattice: embedding search and Riccati check")
    _common(p)
    p.add_argument("--t", help="ascending lattice, e.g. 1,2,3")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--obj-dir", dest="obj_dir", help="also export each flowed mesh as OBJ here")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--filter", help="run only checks with this id or tag")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--timings", action="store_true", help="include per-check timings in JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list or show catalog entries")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("id", nargs="?")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateImmersionWarning)
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MathDomainError as exc:
        print(f"math domain error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
