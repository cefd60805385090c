"""Finite-difference principal curvatures of a sampled immersion into H^{n+1}.

The oracle uses only the stored samples ``phi`` and ``eta``: first and
second parameter derivatives of ``phi`` from fourth-order central stencils
along each grid direction, then

    I_kl = <phi_k, phi_l>,    II_kl = SIGN * <eta, phi_kl>,

and the principal curvatures are the eigenvalues of ``I^{-1} II``. With
``SIGN = +1`` the geodesic sphere of radius r about the origin, oriented by
``eta = -(sinh r, cosh r x)``, has curvature ``coth r``; the test-suite pins
this calibration.
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import DegenerateImmersionWarning, MathDomainError
from .lorentz import mink_inner

SIGN = 1.0

_D1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))              # / 12
_D2 = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))  # / 12


def _shift(a, k, axis, periodic):
    """``b[i] = a[i + k]`` along ``axis``; NaN where that index falls off the patch."""
    if k == 0:
        return a
    if periodic:
        return np.roll(a, -k, axis=axis)
    out = np.full_like(a, np.nan)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if k > 0:
        src[axis], dst[axis] = slice(k, None), slice(0, -k)
    else:
        src[axis], dst[axis] = slice(0, k), slice(-k, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _stencil(a, coeffs, axis, periodic):
    out = 0.0
    for k, c in coeffs:
        out = out + c * _shift(a, k, axis, periodic)
    return out / 12.0


def fundamental_forms(grid, phi, eta):
    """First and second fundamental forms at every node, NaN where a stencil is incomplete.

    Derivatives are taken with respect to the integer grid indices; the
    shape operator does not depend on that choice of scale.
    """
    N, m = phi.shape
    n = m - 2
    I = np.full((N, n, n), np.nan)
    II = np.full((N, n, n), np.nan)
    for p in grid.patches:
        sl = slice(p.start, p.stop)
        P = phi[sl].reshape(p.shape + (m,))
        E = eta[sl].reshape(p.shape + (m,))
        d1 = [_stencil(P, _D1, ax, p.periodic[ax]) for ax in range(n)]
        Ip = np.empty(p.shape + (n, n))
        IIp = np.empty(p.shape + (n, n))
        for k in range(n):
            for l in range(k, n):
                if k == l:
                    dkl = _stencil(P, _D2, k, p.periodic[k])
                else:
                    dkl = _stencil(d1[k], _D1, l, p.periodic[l])
                Ip[..., k, l] = Ip[..., l, k] = mink_inner(d1[k], d1[l])
                IIp[..., k, l] = IIp[..., l, k] = SIGN * mink_inner(E, dkl)
        I[sl] = Ip.reshape(-1, n, n)
        II[sl] = IIp.reshape(-1, n, n)
    return I, II


def shape_eigenvalues(I, II, rtol: float = 1e-12):
    """Eigenvalues of ``I^{-1} II`` (ascending) and a mask of degenerate nodes.

    Nodes with non-finite forms come back as NaN and are not counted as
    degenerate; nodes whose first form is not positive definite are NaN and
    flagged.
    """
    N, n, _ = I.shape
    out = np.full((N, n), np.nan)
    finite = np.all(np.isfinite(I), axis=(1, 2)) & np.all(np.isfinite(II), axis=(1, 2))
    degenerate = np.zeros(N, dtype=bool)
    if not np.any(finite):
        return out, degenerate
    Ii = I[finite]
    ev = np.linalg.eigvalsh(Ii)
    scale = np.maximum(np.abs(ev[:, -1]), np.finfo(float).tiny)
    good = ev[:, 0] > rtol * scale
    idx = np.flatnonzero(finite)
    degenerate[idx[~good]] = True
    if np.any(good):
        L = np.linalg.cholesky(Ii[good])
        X = np.linalg.solve(L, II[finite][good])
        M = np.linalg.solve(L, np.swapaxes(X, -1, -2))
        M = 0.5 * (M + np.swapaxes(M, -1, -2))
        out[idx[good]] = np.linalg.eigvalsh(M)
    return out, degenerate


def fd_principal_curvatures(mesh, owned_only: bool = True) -> np.ndarray:
    """Ascending FD principal curvatures per node; NaN where unavailable."""
    I, II = fundamental_forms(mesh.grid, mesh.phi, mesh.eta)
    kap, degenerate = shape_eigenvalues(I, II)
    if owned_only:
        kap[~mesh.grid.owned] = np.nan
        degenerate &= mesh.grid.owned
    if np.any(degenerate):
        warnings.warn(f"first fundamental form degenerate at {int(degenerate.sum())} node(s), "
                      f"first at node {int(np.argmax(degenerate))}",
                      DegenerateImmersionWarning, stacklevel=2)
    return kap


def principal_curvatures_fd(mesh, node: int) -> np.ndarray:
    """FD principal curvatures at one node.

    Raises ``ValueError`` for nodes without a complete stencil and
    :class:`MathDomainError` where the immersion degenerates.
    """
    grid = mesh.grid
    if not (0 <= node < grid.size) or not grid.active[node]:
        raise ValueError(f"node {node} is not an active grid node")
    I, II = fundamental_forms(grid, mesh.phi, mesh.eta)
    k = node
    if not (np.all(np.isfinite(I[k])) and np.all(np.isfinite(II[k]))):
        raise ValueError(f"node {node} has an incomplete stencil (boundary node)")
    kap, degenerate = shape_eigenvalues(I[k:k + 1], II[k:k + 1])
    if degenerate[0]:
        raise MathDomainError(f"first fundamental form degenerate at node {node}", witness=node)
    return kap[0]

