import math

import numpy as np
import pytest
from scipy.integrate import quad

from gammaspaces.errors import ParameterError
from gammaspaces.grids import (integrate_weighted, make_log_grid, sup_on_interval, t_of_u,
                               u_of_t)
from gammaspaces.spaces import ONE, PowerLogWeight


def test_grid_shape_and_coordinates():
    g = make_log_grid(u_max=1e6, cells=50)
    assert g.edges[0] == 1.0 and g.edges[-1] == 1e6
    assert np.all(np.diff(g.edges) > 0)
    assert g.nodes.shape == (g.cells, g.degree)
    assert u_of_t(1.0) == 1.0
    assert np.isclose(t_of_u(u_of_t(0.3)), 0.3)
    assert g.t_min == pytest.approx(math.exp(1 - 1e6))


@pytest.mark.parametrize("kw", [dict(u_max=1.0), dict(cells=0), dict(panel_degree=1),
                                dict(u_max=float("inf"))])
def test_grid_rejects_bad_parameters(kw):
    with pytest.raises(ParameterError):
        make_log_grid(**kw)


def test_weights_integrate_du_exactly(grid):
    # sum of weights is the u-length of the grid
    assert grid.integral(np.ones_like(grid.nodes)) == pytest.approx(grid.u_max - 1.0, rel=1e-12)


def test_power_log_singular_weight(grid):
    # int_0^1 t^{-1/2} (1 - log t)^{-2} dt; quad in u avoids the singularity
    ref = quad(lambda u: math.exp((u - 1) / 2 + 1 - u) * u ** -2, 1, math.inf, epsrel=1e-13)[0]
    got = integrate_weighted(lambda t: np.ones_like(t), PowerLogWeight(-0.5, -2.0), 0.0, 1.0, grid)
    assert got == pytest.approx(ref, rel=1e-10)


def test_subinterval_and_callable(grid):
    # int_0^{0.3} log(1/t) dt = 0.3 (1 - log 0.3)
    got = integrate_weighted(lambda t: -np.log(t), ONE, 0.0, 0.3, grid)
    assert got == pytest.approx(0.3 * (1 - math.log(0.3)), rel=1e-11)
    got = integrate_weighted(lambda t: t, ONE, 0.2, 0.7, grid)
    assert got == pytest.approx((0.49 - 0.04) / 2, rel=1e-12)


def test_nested_cumulatives_match_totals(grid):
    vals = np.exp(1.0 - grid.nodes)  # dt in u
    t_nodes, t_edges = grid.tail_cumulative(vals)
    h_nodes, h_edges = grid.head_cumulative(vals)
    assert t_edges[-1] == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(t_nodes + h_nodes, t_edges[-1], rtol=1e-12)
    # int_1^u e^{1-v} dv = 1 - e^{1-u}
    assert np.allclose(t_nodes, -np.expm1(1.0 - grid.nodes), rtol=1e-10, atol=1e-15)
    uq = np.array([1.5, 3.0, 40.0])
    assert np.allclose(grid.tail_cumulative_at(vals, uq), -np.expm1(1.0 - uq), rtol=1e-10)


def test_refined_inserts_breaks(grid):
    g2 = grid.refined([2.5, 1.0, grid.u_max * 2])
    assert 2.5 in g2.edges
    assert g2.edge_index(2.5) == int(np.flatnonzero(g2.edges == 2.5)[0])
    assert g2.refined([]) is g2


def test_sup_on_interval(grid):
    v, arg = sup_on_interval(lambda t: t * (1 - t), 0.0, 1.0, grid)
    assert v == pytest.approx(0.25, abs=1e-14)
    assert arg == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(ParameterError):
        sup_on_interval(lambda t: t, 0.5, 0.2, grid)
