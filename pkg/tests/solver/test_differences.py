"""Finite differences, energy norm and Hardy ratio."""
import math

import numpy as np
import pytest
from scipy import ndimage

from polygreen.exceptions import TooCloseToBoundaryError, ZeroFieldError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.fundamental.fundamental_solution import (
    gamma_derivative,
    gamma_values,
)
from polygreen.solver.differences import (
    centered_weights,
    derivative_at,
    derivative_norm,
    energy_norm,
    hardy_ratio,
    mixed_derivative,
)
from polygreen.solver.grid import (
    build_grid,
    field_from_interior,
    sample_function,
)
from polygreen.solver.operator import DiscreteOperator


def test_centered_weights():
    np.testing.assert_array_equal(centered_weights(order=1), [-0.5, 0, 0.5])
    np.testing.assert_array_equal(centered_weights(order=2), [1, -2, 1])
    np.testing.assert_array_equal(
        centered_weights(order=3), [-0.5, 1, 0, -1, 0.5]
    )


def test_constant_field_has_zero_derivative(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=1)
    field = sample_function(
        grid=grid, func=lambda p: np.full(len(p), 3.0), interior_only=False
    )
    values = mixed_derivative(field=field, multi=MultiIndex.unit(2, 0))
    valid = values.values[np.isfinite(values.values)]
    assert valid.size > 0
    np.testing.assert_allclose(valid, 0.0, atol=1e-12)


def test_second_difference_is_exact_on_quadratics(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=2)
    field = sample_function(
        grid=grid, func=lambda p: p[:, 0] ** 2, interior_only=False
    )
    second = mixed_derivative(field=field, multi=MultiIndex(components=(2, 0)))
    valid = second.values[np.isfinite(second.values)]
    np.testing.assert_allclose(valid, 2.0, rtol=1e-10)
    # Nodes closer than 2h to the boundary are undefined.
    edge = grid.snap(point=np.array([0.125, 0.5]))
    assert np.isnan(second.values[edge])


def test_difference_of_the_fundamental_solution(unit_ball_3d):
    params = DimensionParams(m=2, n=3)
    pole = np.array([2.0, 0.0, 0.0])
    grid = build_grid(domain=unit_ball_3d, h=1 / 16, depth=1)
    field = sample_function(
        grid=grid,
        func=lambda p: gamma_values(params=params, points=p - pole),
        interior_only=False,
    )
    e1 = MultiIndex.unit(3, 0)
    node = grid.snap(point=np.array([0.25, 0.0, 0.0]))
    exact = gamma_derivative(
        params=params,
        alpha_x=e1,
        alpha_y=MultiIndex.zero(3),
        x_minus_y=grid.node_point(index=node) - pole,
    )
    numeric = mixed_derivative(field=field, multi=e1).values[node]
    assert numeric == pytest.approx(exact, rel=1e-3)
    assert derivative_at(field=field, multi=e1, index=node) == pytest.approx(
        numeric
    )


def test_derivative_at_refuses_boundary_nodes(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=2)
    field = sample_function(grid=grid, func=lambda p: p[:, 0])
    with pytest.raises(TooCloseToBoundaryError):
        derivative_at(
            field=field,
            multi=MultiIndex(components=(2, 0)),
            index=grid.snap(point=np.array([0.125, 0.5])),
        )


def test_derivative_norm_of_a_linear_field(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=2)
    field = sample_function(
        grid=grid,
        func=lambda p: 3 * p[:, 0] + 4 * p[:, 1],
        interior_only=False,
    )
    norm = derivative_norm(field=field, i=1, multi=MultiIndex.zero(2))
    valid = norm.values[np.isfinite(norm.values)]
    np.testing.assert_allclose(valid, 5.0, rtol=1e-10)


def _lattice_polyharmonic(field, m: int):
    """(-Delta_h)^m by repeated five/seven point stencils on the box."""
    values = field.values.astype(float)
    for _ in range(m):
        laplace = np.zeros_like(values)
        for axis in range(field.grid.n):
            laplace += ndimage.correlate1d(
                values, [1.0, -2.0, 1.0], axis=axis, mode="constant"
            )
        values = -laplace / field.grid.h**2
    return values.reshape(-1)[field.grid.interior_flat]


@pytest.mark.parametrize("m", [1, 2])
def test_lattice_power_matches_the_operator(unit_disk, rng, m):
    grid = build_grid(domain=unit_disk, h=1 / 16, depth=m)
    op = DiscreteOperator(grid=grid, m=m)
    u = rng.normal(size=grid.interior_count)
    field = field_from_interior(grid=grid, interior_values=u)
    lattice = _lattice_polyharmonic(field, m)
    np.testing.assert_allclose(
        lattice, op.apply(interior_values=u), rtol=1e-10, atol=1e-6
    )


@pytest.mark.parametrize("m", [1, 2])
def test_energy_norm_is_the_operator_form(unit_disk, rng, m):
    grid = build_grid(domain=unit_disk, h=1 / 16, depth=m)
    op = DiscreteOperator(grid=grid, m=m)
    u = rng.normal(size=grid.interior_count)
    field = field_from_interior(grid=grid, interior_values=u)
    form = float(u @ op.apply(interior_values=u)) * grid.h**grid.n
    assert energy_norm(field=field, m=m) ** 2 == pytest.approx(form)


def test_energy_norm_of_zero(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=1)
    field = field_from_interior(
        grid=grid, interior_values=np.zeros(grid.interior_count)
    )
    assert energy_norm(field=field, m=1) == 0.0


def test_energy_norm_of_a_sine_product(unit_square):
    grid = build_grid(domain=unit_square, h=1 / 32, depth=1)
    field = sample_function(
        grid=grid,
        func=lambda p: np.sin(math.pi * p[:, 0]) * np.sin(math.pi * p[:, 1]),
    )
    assert energy_norm(field=field, m=1) == pytest.approx(
        math.pi / math.sqrt(2), rel=0.01
    )


def test_hardy_ratio(unit_square):
    grid = build_grid(domain=unit_square, h=0.125, depth=2)
    q = np.zeros(2)
    with pytest.raises(ZeroFieldError):
        hardy_ratio(
            field=sample_function(grid=grid, func=lambda p: 0 * p[:, 0]),
            m=2,
            q=q,
        )
    field = sample_function(
        grid=grid, func=lambda p: np.sin(math.pi * p[:, 0]) * p[:, 1]
    )
    ratio = hardy_ratio(field=field, m=2, q=q)
    assert ratio > 0
    assert hardy_ratio(
        field=field.scaled(factor=2.0), m=2, q=q
    ) == pytest.approx(ratio)
