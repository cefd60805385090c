from __future__ import annotations

import math

import numpy as np
import pytest

from horocorr.catalog import make_constant, make_flat_punctured
from horocorr.correspondence import HypersurfaceMesh, metric_to_hypersurface
from horocorr.curvature import fd_principal_curvatures, principal_curvatures_fd, shape_eigenvalues
from horocorr.domains import DomainSpec, build_grid
from horocorr.errors import DegenerateImmersionWarning, MathDomainError


@pytest.fixture(scope="module")
def grid64():
    return build_grid(DomainSpec.full_sphere(2), 64)


def test_sphere_calibration(grid64):
    m = metric_to_hypersurface(make_constant(0.0).metric, 1.0, grid64)
    K = fd_principal_curvatures(m)
    o = m.owned
    assert np.all(np.isfinite(K[o]))
    assert np.max(np.abs(K[o] - 1 / math.tanh(1))) < 1e-3


def test_single_node(grid64):
    m = metric_to_hypersurface(make_constant(0.0).metric, 1.0, grid64)
    node = int(np.flatnonzero(m.owned)[100])
    assert np.allclose(principal_curvatures_fd(m, node), 1 / math.tanh(1), atol=1e-3)
    with pytest.raises(ValueError):
        principal_curvatures_fd(m, grid64.size + 3)


def test_boundary_node_rejected():
    e = make_flat_punctured()
    grid = e.grid((32, 32))
    m = metric_to_hypersurface(e.metric, 0.0, grid)
    # the first row of the polar patch has no full stencil in the radial direction
    with pytest.raises(ValueError):
        principal_curvatures_fd(m, 0)
    inner = grid.size // 2
    assert np.allclose(principal_curvatures_fd(m, inner), 1.0, atol=1e-3)


def test_degenerate_first_form(grid64):
    with pytest.warns(DegenerateImmersionWarning):
        m = metric_to_hypersurface(make_constant(0.0).metric, 0.0, grid64)
    with pytest.warns(DegenerateImmersionWarning, match="degenerate"):
        K = fd_principal_curvatures(m)
    assert np.all(np.isnan(K[m.owned]))
    node = int(np.flatnonzero(m.owned)[50])
    with pytest.raises(MathDomainError):
        principal_curvatures_fd(m, node)


def test_only_sigma_matters(grid64):
    a = metric_to_hypersurface(make_constant(0.5).metric, 0.5, grid64, curvatures=True)
    b = metric_to_hypersurface(make_constant(0.0).metric, 1.0, grid64, curvatures=True)
    o = a.owned
    assert np.max(np.abs(a.phi[o] - b.phi[o])) < 1e-12
    assert np.max(np.abs(a.kappas[o] - b.kappas[o])) < 1e-9


def test_shape_eigenvalues_direct():
    I = np.array([[[2.0, 0], [0, 1.0]], [[1.0, 0], [0, 0.0]], [[np.nan, 0], [0, 1]]])
    II = np.array([[[2.0, 0], [0, 3.0]], [[1.0, 0], [0, 1.0]], [[1.0, 0], [0, 1]]])
    k, deg = shape_eigenvalues(I, II)
    assert np.allclose(k[0], [1, 3])
    assert deg.tolist() == [False, True, False]
    assert np.all(np.isnan(k[1:]))


def test_flat_horosphere_fd():
    e = make_flat_punctured()
    m = metric_to_hypersurface(e.metric, 0.0, e.grid())
    K = fd_principal_curvatures(m)
    ok = np.all(np.isfinite(K), axis=1)
    assert ok.sum() > 0.8 * m.owned.sum()
    assert np.max(np.abs(K[ok] - 1)) < 1e-3
    bare = HypersurfaceMesh(m.grid, m.phi, m.eta, m.psi, m.support, m.gauss)
    assert np.array_equal(np.isnan(fd_principal_curvatures(bare)), np.isnan(K))
