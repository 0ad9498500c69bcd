import math

import numpy as np
import pytest

from polygreen.exceptions import GeometryInfeasibleError
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.harness.verify_decay import (
    BumpSource,
    far_source,
    near_source,
    verify_decay_at_infinity,
    verify_interior_decay,
)

LEVELS = [1 / 16, 1 / 32]
Q = np.array([-0.01, 0.5])


@pytest.fixture
def strip() -> Domain:
    return Domain(kind=DomainKind.RECTANGLE, n=2, shape=(4.0, 1.0))


def test_bump_plateau_and_support():
    bump = BumpSource(center=np.zeros(2), rho=0.2)
    values = bump.values(np.array([[0.05, 0.0], [0.0, 0.25], [0.3, 0.3]]))
    assert values[0] == pytest.approx(1.0)
    assert values[1] == 0.0
    assert values[2] == 0.0


def test_far_source_keeps_away_from_q(strip):
    source = far_source(domain=strip, q=Q, radius=0.4)
    assert np.linalg.norm(source.center - Q) - source.rho >= 1.6
    assert source.rho <= strip.distance_to_boundary(x=source.center)


def test_near_source_stays_close_to_q(strip):
    source = near_source(domain=strip, q=Q, radius=0.4)
    assert np.linalg.norm(source.center - Q) + source.rho <= 0.1 + 1e-12
    assert strip.contains(x=source.center)


def test_near_source_needs_room(unit_square):
    with pytest.raises(GeometryInfeasibleError):
        near_source(domain=unit_square, q=np.array([1.2, 0.5]), radius=0.1)


def test_q_must_lie_outside(strip):
    with pytest.raises(GeometryInfeasibleError, match="outside"):
        verify_interior_decay(
            domain=strip,
            params=DimensionParams(m=1, n=2),
            q=np.array([1.0, 0.5]),
            radius=0.4,
            grid_levels=LEVELS,
        )


def test_zero_source_gives_zero_constants(strip):
    report = verify_interior_decay(
        domain=strip,
        params=DimensionParams(m=1, n=2),
        q=Q,
        radius=0.4,
        grid_levels=LEVELS,
        zero_source=True,
    )
    assert report.measurements["pointwise_i0_h0.0625"] == 0.0
    assert report.measurements["sphere_h0.03125"] == 0.0
    assert report.passed


def test_interior_decay_near_the_boundary(strip):
    report = verify_interior_decay(
        domain=strip,
        params=DimensionParams(m=1, n=2),
        q=Q,
        radius=0.4,
        grid_levels=LEVELS,
    )
    assert all(math.isfinite(v) for v in report.measurements.values())
    assert report.measurements["pointwise_i0_h0.03125"] > 0
    assert report.verdicts["two_point"]


def test_decay_at_infinity_judges_the_exponent(strip):
    report = verify_decay_at_infinity(
        domain=strip,
        params=DimensionParams(m=1, n=2),
        q=Q,
        radius=0.8,
        grid_levels=LEVELS,
    )
    assert all(math.isfinite(v) for v in report.measurements.values())
    assert report.measurements["decay_exponent_bound"] == pytest.approx(0.3)
    # The strip damps u exponentially along its length.
    assert report.measurements["decay_exponent"] < 0
    assert report.verdicts["decay_exponent"]
    assert report.measurements["sphere_h0.03125"] > 0


def test_decay_at_infinity_without_source_has_no_exponent(strip):
    report = verify_decay_at_infinity(
        domain=strip,
        params=DimensionParams(m=1, n=2),
        q=Q,
        radius=0.8,
        grid_levels=LEVELS,
        zero_source=True,
    )
    assert "decay_exponent" not in report.verdicts
    assert "decay_exponent" not in report.measurements
    assert "decay_exponent" in report.notes


def test_biharmonic_decay_away_from_the_ball_boundary(unit_ball_3d):
    report = verify_decay_at_infinity(
        domain=unit_ball_3d,
        params=DimensionParams(m=2, n=3),
        q=np.array([0.0, 0.0, 1.001]),
        radius=0.4,
        grid_levels=[1 / 12, 1 / 16],
    )
    exponent = report.measurements["decay_exponent"]
    assert report.measurements["decay_exponent_predicted"] == 0.0
    # sup|u| on S_rho(Q) falls like d(x)^2 / rho^3 with d(x) <= rho.
    assert -2.5 <= exponent <= 0.3
    assert report.verdicts["decay_exponent"]
