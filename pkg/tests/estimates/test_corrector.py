"""Corrector sources and discrete correctors."""
import math

import numpy as np
import pytest

from polygreen.estimates.corrector import (
    corrector_energy_ratio,
    corrector_field,
    corrector_source,
    masked_singular_part,
    source_scale_product,
    source_values,
)
from polygreen.estimates.cutoff import CutoffFunction
from polygreen.exceptions import SpecMismatchError, TooCloseToBoundaryError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.fundamental.fundamental_solution import gamma_values
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.solver.green import GreenColumns
from polygreen.solver.grid import build_grid
from polygreen.solver.operator import assemble_operator

M1N3 = DimensionParams(m=1, n=3)
M2N3 = DimensionParams(m=2, n=3)


def _masked_gamma(points: np.ndarray, cutoff: CutoffFunction) -> np.ndarray:
    return cutoff.eta(points=points, scale=1.0) * gamma_values(
        params=M1N3, points=points
    )


def test_laplace_source_is_the_laplacian_of_the_masked_kernel():
    cutoff = CutoffFunction(max_order=4)
    rng = np.random.Generator(np.random.Philox(3))
    directions = rng.normal(size=(20, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    points = rng.uniform(0.28, 0.47, 20)[:, None] * directions
    values = source_values(
        params=M1N3,
        alpha=MultiIndex.zero(3),
        points=points,
        scale=1.0,
        cutoff=cutoff,
    )
    step = 1e-4
    laplacian = -6 * _masked_gamma(points, cutoff)
    for k in range(3):
        shift = step * np.eye(3)[k]
        laplacian += _masked_gamma(points + shift, cutoff)
        laplacian += _masked_gamma(points - shift, cutoff)
    expected = laplacian / step**2
    np.testing.assert_allclose(
        values, expected, rtol=1e-3, atol=1e-4 * np.max(np.abs(expected))
    )


def test_source_vanishes_off_the_band():
    cutoff = CutoffFunction(max_order=4)
    points = np.array([[0.1, 0.0, 0.0], [0.0, 0.6, 0.0], [0.0, 0.0, 0.9]])
    values = source_values(
        params=M2N3,
        alpha=MultiIndex.unit(3, 1),
        points=points,
        scale=1.0,
        cutoff=cutoff,
    )
    assert np.all(values == 0.0)
    masked = masked_singular_part(
        params=M2N3,
        alpha=MultiIndex.unit(3, 1),
        points=points[1:],
        scale=1.0,
        cutoff=cutoff,
    )
    np.testing.assert_allclose(masked, 0.0)


def test_orders_above_lambda_are_refused(unit_ball_3d):
    grid = build_grid(domain=unit_ball_3d, h=1 / 16, depth=2)
    with pytest.raises(SpecMismatchError):
        corrector_source(
            params=M2N3,
            alpha=MultiIndex(components=(1, 1, 0)),
            y=np.zeros(3),
            domain=unit_ball_3d,
            cutoff=CutoffFunction(max_order=4),
            grid=grid,
        )


def test_source_scaling_is_stable(unit_ball_3d):
    grid = build_grid(domain=unit_ball_3d, h=1 / 32, depth=2)
    cutoff = CutoffFunction(max_order=4)
    alpha = MultiIndex.unit(3, 0)
    products = []
    for radius in (0.0, 0.2, 0.4):
        y = np.array([radius, 0.0, 0.0])
        source = corrector_source(
            params=M2N3,
            alpha=alpha,
            y=y,
            domain=unit_ball_3d,
            cutoff=cutoff,
            grid=grid,
        )
        scale = unit_ball_3d.distance_to_boundary(
            x=grid.node_point(index=source.source)
        )
        products.append(
            source_scale_product(source=source, alpha=alpha, scale=scale)
        )
    assert max(products) <= 2 * min(products)


def test_source_too_close_to_the_boundary(unit_ball_3d):
    grid = build_grid(domain=unit_ball_3d, h=1 / 16, depth=1)
    with pytest.raises(TooCloseToBoundaryError):
        corrector_source(
            params=M1N3,
            alpha=MultiIndex.zero(3),
            y=np.array([0.5, 0.0, 0.0]),
            domain=unit_ball_3d,
            cutoff=CutoffFunction(max_order=2),
            grid=grid,
        )


@pytest.fixture(scope="module")
def ball_columns():
    domain = Domain(kind=DomainKind.UNIT_BALL, n=3)
    op = assemble_operator(domain=domain, m=1, h=1 / 16)
    return domain, GreenColumns(op=op)


def test_corrector_at_the_centre_of_the_ball(ball_columns):
    domain, columns = ball_columns
    cutoff = CutoffFunction(max_order=2)
    expected = -1 / (4 * math.pi)
    for method in ("solve", "difference"):
        corrector = corrector_field(
            params=M1N3,
            alpha=MultiIndex.zero(3),
            y=np.zeros(3),
            domain=domain,
            cutoff=cutoff,
            columns=columns,
            method=method,
        )
        value = corrector.values[corrector.source]
        assert np.isfinite(value)
        if method == "solve":
            assert value == pytest.approx(expected, rel=0.1)
        # Beyond d(y)/2 the corrector is the Green function itself.
        far = columns.op.grid.snap(point=np.array([0.75, 0.0, 0.0]))
        green = columns.column(node=corrector.source).values[far]
        if method == "difference":
            assert corrector.values[far] == pytest.approx(green)
        ratio = corrector_energy_ratio(
            corrector=corrector,
            params=M1N3,
            alpha=MultiIndex.zero(3),
            scale=1.0,
        )
        assert 0 < ratio < math.inf


def test_unknown_corrector_method(ball_columns):
    domain, columns = ball_columns
    with pytest.raises(ValueError):
        corrector_field(
            params=M1N3,
            alpha=MultiIndex.zero(3),
            y=np.zeros(3),
            domain=domain,
            cutoff=CutoffFunction(max_order=2),
            columns=columns,
            method="series",
        )
