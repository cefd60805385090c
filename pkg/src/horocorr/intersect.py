"""Self-intersection detection for triangle meshes in the Poincare ball.

Candidate pairs come from a uniform spatial hash whose cell is twice the
largest triangle diameter, so every triangle touches at most 2^3 cells and
two intersecting triangles always share one. Pairs sharing a vertex are
skipped. Each remaining pair is tested with orientation predicates: two
non-coplanar triangles meet iff an edge of one crosses the other.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

CHUNK = 20_000


@dataclass
class EmbeddingVerdict:
    verdict: str                        # Embedded | SelfIntersecting
    witness: tuple | None = None        # triangle index pair (i < j)
    point: list | None = None           # a common point of the witness pair
    cells_checked: int = 0
    pairs_tested: int = 0
    triangles: int = 0
    degenerate_skipped: int = 0
    cell_size: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def embedded(self) -> bool:
        return self.verdict == "Embedded"

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["witness"] = list(self.witness) if self.witness else None
        return d


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("HOROCORR_THREADS")
        threads = int(env) if env else 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def _orient(a, b, c, d):
    """Signed volume of the tetrahedron (a, b, c, d), times 6."""
    return np.einsum("...i,...i->...", np.cross(b - a, c - a), d - a)


def _edge_hits(P, Q, A, B, C):
    """Does segment PQ meet triangle ABC?  Also flags coplanar configurations."""
    dp = _orient(A, B, C, P)
    dq = _orient(A, B, C, Q)
    coplanar = (dp == 0) & (dq == 0)
    straddle = ((dp <= 0) & (dq >= 0)) | ((dp >= 0) & (dq <= 0))
    s1 = _orient(P, Q, A, B)
    s2 = _orient(P, Q, B, C)
    s3 = _orient(P, Q, C, A)
    inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
    return straddle & inside & ~coplanar, coplanar


def _pair_hits(V, T, I, J):
    ta, tb = V[T[I]], V[T[J]]
    hit = np.zeros(len(I), dtype=bool)
    cop = np.ones(len(I), dtype=bool)
    for X, Y in ((ta, tb), (tb, ta)):
        for e in range(3):
            P, Q = X[:, e], X[:, (e + 1) % 3]
            h, c = _edge_hits(P, Q, Y[:, 0], Y[:, 1], Y[:, 2])
            hit |= h
            cop &= c
    return hit, cop


def _seg_tri_point(P, Q, A, B, C):
    dp = _orient(A, B, C, P)
    dq = _orient(A, B, C, Q)
    if dp == dq:
        return None
    s = dp / (dp - dq)
    if not 0 <= s <= 1:
        return None
    s1, s2, s3 = _orient(P, Q, A, B), _orient(P, Q, B, C), _orient(P, Q, C, A)
    if (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0):
        return P + s * (Q - P)
    return None


def _witness_point(V, ta, tb):
    for X, Y in ((ta, tb), (tb, ta)):
        for e in range(3):
            pt = _seg_tri_point(V[X[e]], V[X[(e + 1) % 3]], V[Y[0]], V[Y[1]], V[Y[2]])
            if pt is not None:
                return pt
    return None


def _coplanar_overlap(V, ta, tb):
    """2D overlap test for two coplanar triangles (rare fallback)."""
    A, B = V[ta], V[tb]
    nrm = np.cross(A[1] - A[0], A[2] - A[0])
    drop = int(np.argmax(np.abs(nrm)))
    keep = [i for i in range(3) if i != drop]
    a, b = A[:, keep], B[:, keep]

    def cross2(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    def seg_cross(p1, p2, q1, q2):
        d1, d2 = cross2(q1, q2, p1), cross2(q1, q2, p2)
        d3, d4 = cross2(p1, p2, q1), cross2(p1, p2, q2)
        return (d1 * d2 <= 0) and (d3 * d4 <= 0) and not (d1 == d2 == 0)

    def inside(pt, tri):
        s = [cross2(tri[i], tri[(i + 1) % 3], pt) for i in range(3)]
        return all(v >= 0 for v in s) or all(v <= 0 for v in s)

    for i in range(3):
        for j in range(3):
            if seg_cross(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]):
                return True
    return inside(a[0], b) or inside(b[0], a)


def candidate_pairs(V, T, tri_ok):
    """Index pairs (i < j) of triangles sharing a hash cell, without shared vertices.

    Pairs whose bounding boxes are disjoint are dropped here as well; they
    cannot intersect.
    """
    tris = np.flatnonzero(tri_ok)
    P = V[T[tris]]
    diam = np.max(np.linalg.norm(P - np.roll(P, 1, axis=1), axis=2), axis=1)
    cell = 2.0 * float(diam.max()) if len(diam) else 1.0
    if cell <= 0:
        cell = 1.0
    bmin, bmax = P.min(axis=1), P.max(axis=1)
    lo = np.floor(bmin / cell).astype(np.int64)
    hi = np.floor(bmax / cell).astype(np.int64)
    base = lo.min(axis=0)
    span = int((hi.max(axis=0) - base).max()) + 2
    keys = []
    for corner in range(8):
        pick = np.array([(corner >> ax) & 1 for ax in range(3)], dtype=bool)
        k = np.where(pick, hi, lo) - base
        keys.append((k[:, 0] * span + k[:, 1]) * span + k[:, 2])
    keys = np.stack(keys, axis=1)
    # a triangle registers once per distinct cell it touches
    keys.sort(axis=1)
    dup = np.zeros_like(keys, dtype=bool)
    dup[:, 1:] = keys[:, 1:] == keys[:, :-1]
    owners = np.broadcast_to(np.arange(len(tris))[:, None], keys.shape)[~dup]
    keys = keys[~dup]
    order = np.lexsort((owners, keys))
    keys, owners = keys[order], owners[order]
    bounds = np.flatnonzero(np.diff(keys)) + 1
    start = np.concatenate([[0], bounds])
    counts = np.diff(np.concatenate([start, [len(keys)]]))
    I, J = [], []
    for s, c in zip(start[counts > 1], counts[counts > 1]):
        members = owners[s:s + c]
        a, b = np.triu_indices(c, 1)
        I.append(members[a])
        J.append(members[b])
    if not I:
        return np.zeros((0, 2), dtype=np.int64), len(start), cell
    I = np.concatenate(I)
    J = np.concatenate(J)
    # members are sorted within a cell, so I < J already
    code = np.unique(I * len(tris) + J)
    I, J = code // len(tris), code % len(tris)
    overlap = np.all((bmin[I] <= bmax[J]) & (bmin[J] <= bmax[I]), axis=1)
    I, J = tris[I[overlap]], tris[J[overlap]]
    share = np.zeros(len(I), dtype=bool)
    TA, TB = T[I], T[J]
    for u in range(3):
        for v in range(3):
            share |= TA[:, u] == TB[:, v]
    return np.column_stack([I[~share], J[~share]]), len(start), cell


def mesh_triangles(mesh):
    """Ball-model vertices and owned triangles of a surface mesh (n = 2)."""
    from .lorentz import to_poincare_ball

    T = mesh.grid.triangles
    V = np.full((mesh.grid.size, 3), np.nan)
    used = np.unique(T)
    V[used] = to_poincare_ball(mesh.phi[used])
    return V, T


def embeddedness_check(mesh, triangles=None, threads: int | None = None) -> EmbeddingVerdict:
    """Search a triangle mesh (a surface mesh or vertex/triangle arrays) for self-intersections.

    The verdict and witness do not depend on ``threads``: pairs are tested
    in lexicographic order in fixed chunks and the smallest intersecting pair
    wins.
    """
    if triangles is None:
        V, T = mesh_triangles(mesh)
    else:
        V, T = np.asarray(mesh, dtype=float), np.asarray(triangles, dtype=np.int64)
    if V.shape[1] != 3:
        raise ValueError("embeddedness checks need triangles in 3-space (n = 2)")
    if len(T) == 0:
        return EmbeddingVerdict("Embedded")
    P = V[T]
    area = 0.5 * np.linalg.norm(np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]), axis=1)
    finite = np.all(np.isfinite(P), axis=(1, 2))
    amax = float(np.max(area[finite])) if np.any(finite) else 0.0
    tri_ok = finite & (area >= 1e-14 * amax)
    skipped = int(np.count_nonzero(finite & ~tri_ok))
    pairs, cells, cell = candidate_pairs(V, T, tri_ok)

    chunks = [pairs[i:i + CHUNK] for i in range(0, len(pairs), CHUNK)]

    def run(ch):
        hit, cop = _pair_hits(V, T, ch[:, 0], ch[:, 1])
        for k in np.flatnonzero(cop & ~hit):
            hit[k] = _coplanar_overlap(V, T[ch[k, 0]], T[ch[k, 1]])
        idx = np.flatnonzero(hit)
        return ch[idx[0]] if len(idx) else None

    nthreads = resolve_threads(threads)
    if nthreads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            found = list(ex.map(run, chunks))
    else:
        found = [run(c) for c in chunks]
    first = next((f for f in found if f is not None), None)
    common = dict(cells_checked=int(cells), pairs_tested=int(len(pairs)), triangles=int(len(T)),
                  degenerate_skipped=skipped, cell_size=cell)
    if first is None:
        return EmbeddingVerdict("Embedded", **common)
    i, j = int(first[0]), int(first[1])
    pt = _witness_point(V, T[i], T[j])
    if pt is None:
        pt = V[T[i]].mean(axis=0)  # coplanar overlap: report the first triangle's centroid
    return EmbeddingVerdict("SelfIntersecting", (i, j), pt.tolist(), **common)
