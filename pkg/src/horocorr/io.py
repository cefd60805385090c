"""OBJ meshes, sidecar JSON and report serialization."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .lorentz import to_poincare_ball

REPORT_SCHEMA = "report/v1"
CONFIG_SCHEMA = "config/v1"
SIDECAR_SCHEMA = "mesh-sidecar/v1"


def to_jsonable(obj):
    """Recursively turn numpy values into plain JSON types; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def obj_text(mesh) -> tuple[str, np.ndarray]:
    """OBJ text of an n = 2 mesh in Y-up ball coordinates, and the exported node ids."""
    T = mesh.grid.triangles
    used = np.unique(T)
    B = to_poincare_ball(mesh.phi[used])
    remap = np.full(mesh.grid.size, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    lines = [f"# horocorr mesh: {mesh.label} t={mesh.flow_time:.9g}",
             f"# {len(used)} vertices, {len(T)} faces, Poincare ball (x, z, -y)"]
    for b in B:
        lines.append(f"v {b[0]:.9g} {b[2]:.9g} {0.0 - b[1]:.9g}")
    for tri in remap[T] + 1:
        lines.append(f"f {tri[0]} {tri[1]} {tri[2]}")
    return "\n".join(lines) + "\n", used


def sidecar(mesh, nodes) -> dict:
    K = mesh.kappas[nodes] if mesh.kappas is not None else None
    L = mesh.lambdas[nodes] if mesh.lambdas is not None else None
    return {
        "schema": SIDECAR_SCHEMA,
        "label": mesh.label,
        "flow_time": mesh.flow_time,
        "nodes": nodes,
        "support": mesh.support[nodes],
        "gauss": mesh.gauss[nodes],
        "kappas": K,
        "lambdas": L,
    }


def write_mesh(path, mesh) -> tuple[Path, Path]:
    """Write ``path`` (OBJ) and ``path`` with suffix ``.json`` (sidecar)."""
    path = Path(path)
    text, nodes = obj_text(mesh)
    path.write_text(text)
    side = path.with_suffix(".json")
    write_json(side, sidecar(mesh, nodes))
    return path, side
