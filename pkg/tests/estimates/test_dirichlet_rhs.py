"""Quadrature of the Dirichlet bound right-hand sides."""
import math

import numpy as np
import pytest

from polygreen.estimates.dirichlet_rhs import (
    cell_integral,
    data_lp_norm,
    diagonal_cell_constant,
    dirichlet_rhs,
)
from polygreen.exceptions import SpecMismatchError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.solver.grid import build_grid, field_from_interior

M2N3 = DimensionParams(m=2, n=3)


def test_diagonal_cell_constants():
    # Potential of the unit cube at its centre.
    cube = 3 * math.log((math.sqrt(3) + 1) / (math.sqrt(3) - 1)) - math.pi / 2
    assert diagonal_cell_constant(n=3) == pytest.approx(cube, rel=1e-6)
    square = 4 * math.log(1 + math.sqrt(2))
    assert diagonal_cell_constant(n=2) == pytest.approx(square, rel=1e-6)


def test_cell_volume():
    assert cell_integral(
        n=3, h=0.5, func=lambda r: np.ones_like(r)
    ) == pytest.approx(0.125)


@pytest.fixture
def ball_grid(unit_ball_3d):
    return build_grid(domain=unit_ball_3d, h=0.125, depth=2)


def _indicator(grid, point):
    values = np.zeros(grid.interior_count)
    node = grid.snap(point=point)
    lookup = grid.flat_to_interior()
    values[lookup[np.ravel_multi_index(node, grid.shape)]] = 1.0
    return field_from_interior(grid=grid, interior_values=values), node


def test_zero_data(unit_ball_3d, ball_grid):
    x = np.array([0.25, 0.0, 0.0])
    assert dirichlet_rhs(params=M2N3, x=x, data=[], domain=unit_ball_3d) == 0
    zero = field_from_interior(
        grid=ball_grid, interior_values=np.zeros(ball_grid.interior_count)
    )
    assert (
        dirichlet_rhs(
            params=M2N3,
            x=x,
            data=[(MultiIndex.zero(3), zero)],
            domain=unit_ball_3d,
        )
        == 0.0
    )


def test_single_cell_source(unit_ball_3d, ball_grid):
    field, node = _indicator(ball_grid, np.array([-0.5, 0.0, 0.0]))
    x = np.array([0.25, 0.125, 0.0])
    y_c = ball_grid.node_point(index=node)
    d_c = unit_ball_3d.distance_to_boundary(x=y_c)
    value = dirichlet_rhs(
        params=M2N3,
        x=x,
        data=[(MultiIndex.zero(3), field)],
        domain=unit_ball_3d,
    )
    expected = d_c * ball_grid.h**3 / float(np.linalg.norm(x - y_c))
    assert value == pytest.approx(expected, rel=1e-12)


def test_bound_is_linear_in_the_data(unit_ball_3d, ball_grid):
    rng = np.random.Generator(np.random.Philox(5))
    field = field_from_interior(
        grid=ball_grid,
        interior_values=rng.normal(size=ball_grid.interior_count),
    )
    x = np.array([0.0, 0.25, 0.0])
    data = [(MultiIndex.unit(3, 2), field)]
    once = dirichlet_rhs(params=M2N3, x=x, data=data, domain=unit_ball_3d)
    twice = dirichlet_rhs(
        params=M2N3,
        x=x,
        data=[(MultiIndex.unit(3, 2), field.scaled(factor=2.0))],
        domain=unit_ball_3d,
    )
    assert twice == pytest.approx(2 * once)


def test_orders_above_lambda_are_refused(unit_ball_3d, ball_grid):
    field, _ = _indicator(ball_grid, np.zeros(3))
    with pytest.raises(SpecMismatchError):
        dirichlet_rhs(
            params=M2N3,
            x=np.array([0.25, 0.0, 0.0]),
            data=[(MultiIndex(components=(2, 0, 0)), field)],
            domain=unit_ball_3d,
        )


def test_epsilon_form_needs_even_dimension(unit_ball_3d, ball_grid):
    field, _ = _indicator(ball_grid, np.zeros(3))
    with pytest.raises(ValueError):
        dirichlet_rhs(
            params=M2N3,
            x=np.array([0.25, 0.0, 0.0]),
            data=[(MultiIndex.zero(3), field)],
            domain=unit_ball_3d,
            epsilon=0.5,
        )


def test_even_dimension_forms(unit_disk):
    params = DimensionParams(m=2, n=2)
    grid = build_grid(domain=unit_disk, h=0.125, depth=2)
    field = field_from_interior(
        grid=grid, interior_values=np.ones(grid.interior_count)
    )
    data = [(MultiIndex.zero(2), field)]
    x = np.array([0.25, 0.0])
    logarithmic = dirichlet_rhs(
        params=params, x=x, data=data, domain=unit_disk
    )
    power = dirichlet_rhs(
        params=params, x=x, data=data, domain=unit_disk, epsilon=0.5
    )
    assert 0 < logarithmic < math.inf
    assert 0 < power < math.inf


def test_data_lp_norm(ball_grid):
    field = field_from_interior(
        grid=ball_grid, interior_values=np.ones(ball_grid.interior_count)
    )
    # The distance weight has exponent 0 for alpha = 0.
    norm = data_lp_norm(params=M2N3, data=[(MultiIndex.zero(3), field)], p=2)
    volume = ball_grid.interior_count * ball_grid.h**3
    assert norm == pytest.approx(math.sqrt(volume))
    with pytest.raises(ValueError):
        data_lp_norm(params=M2N3, data=[(MultiIndex.zero(3), field)], p=1.2)
