"""Boundary distances, membership and boundary points of the domains."""
import math

import numpy as np
import pytest

from polygreen.exceptions import PointOutsideDomainError
from polygreen.geometry.domain import Domain, DomainKind


def test_unit_ball_distance(unit_ball_3d):
    x = np.array([0.5, 0.0, 0.0])
    assert unit_ball_3d.distance_to_boundary(x=x) == pytest.approx(0.5)


def test_punctured_ball_counts_the_puncture():
    domain = Domain(kind=DomainKind.PUNCTURED_BALL, n=3, shape=(0.0,))
    x = np.array([0.25, 0.0, 0.0])
    assert domain.distance_to_boundary(x=x) == pytest.approx(0.25)
    assert not domain.contains(x=np.zeros(3))


def test_rectangle_nearest_side():
    domain = Domain(kind=DomainKind.RECTANGLE, n=2, shape=(2.0, 1.0))
    x = np.array([1.0, 0.3])
    assert domain.distance_to_boundary(x=x) == pytest.approx(0.3)
    np.testing.assert_allclose(
        domain.nearest_boundary_point(x=x), [1.0, 0.0]
    )


def test_outside_point_raises(unit_ball_3d):
    with pytest.raises(PointOutsideDomainError):
        unit_ball_3d.distance_to_boundary(x=np.array([1.5, 0.0, 0.0]))


@pytest.mark.parametrize(
    "kind,n,shape",
    [
        (DomainKind.UNIT_BALL, 3, (1.0,)),
        (DomainKind.ANNULUS, 2, (1.0, 0.5)),
        (DomainKind.ELLIPSE, 3, (1.0, 0.5)),
        (DomainKind.RECTANGLE, 2, (1.0, -1.0)),
        (DomainKind.PUNCTURED_BALL, 3, (1.0,)),
    ],
)
def test_invalid_shapes(kind, n, shape):
    with pytest.raises(ValueError):
        Domain(kind=kind, n=n, shape=shape)


def test_diameters():
    assert Domain(kind=DomainKind.UNIT_BALL, n=3).diameter == 2.0
    rectangle = Domain(kind=DomainKind.RECTANGLE, n=2, shape=(3.0, 4.0))
    assert rectangle.diameter == pytest.approx(5.0)
    ellipse = Domain(kind=DomainKind.ELLIPSE, n=2, shape=(2.0, 1.0))
    assert ellipse.diameter == pytest.approx(4.0)


@pytest.mark.parametrize(
    "domain",
    [
        Domain(kind=DomainKind.ANNULUS, n=2, shape=(0.3, 1.0)),
        Domain(kind=DomainKind.ELLIPSE, n=2, shape=(1.5, 0.75)),
        Domain(kind=DomainKind.L_SHAPE, n=2, shape=(1.0, 1.0)),
        Domain(kind=DomainKind.RECTANGLE, n=3, shape=(1.0, 2.0, 0.5)),
        Domain(kind=DomainKind.PUNCTURED_BALL, n=3, shape=(0.2,)),
    ],
)
def test_nearest_boundary_point_realises_the_distance(domain, rng):
    for _ in range(20):
        x = domain.sample_interior_point(rng=rng)
        boundary = domain.nearest_boundary_point(x=x)
        assert float(np.linalg.norm(boundary - x)) == pytest.approx(
            domain.distance_to_boundary(x=x), rel=1e-6, abs=1e-9
        )


def test_exterior_point_leaves_the_domain(rng):
    domain = Domain(kind=DomainKind.ELLIPSE, n=2, shape=(1.5, 0.75))
    for _ in range(10):
        x = domain.sample_interior_point(rng=rng)
        assert not domain.contains(x=domain.exterior_point(x=x))


def test_l_shape_excludes_the_notch():
    domain = Domain(kind=DomainKind.L_SHAPE, n=2, shape=(1.0, 1.0))
    assert domain.contains(x=np.array([0.25, 0.75]))
    assert not domain.contains(x=np.array([0.75, 0.75]))
    # Nearest boundary is the lower edge of the notch.
    x = np.array([0.6, 0.4])
    assert domain.distance_to_boundary(x=x) == pytest.approx(0.1)


def test_ellipse_distance_on_the_axis():
    domain = Domain(kind=DomainKind.ELLIPSE, n=2, shape=(2.0, 1.0))
    assert domain.distance_to_boundary(
        x=np.array([0.0, 0.25])
    ) == pytest.approx(0.75)
    assert domain.signed_distance(points=np.array([[3.0, 0.0]]))[
        0
    ] == pytest.approx(-1.0)


def test_sampled_points_are_members(rng):
    domain = Domain(kind=DomainKind.ANNULUS, n=3, shape=(0.5, 1.0))
    points = [domain.sample_interior_point(rng=rng) for _ in range(50)]
    radii = [float(np.linalg.norm(p)) for p in points]
    assert all(0.5 < r < 1.0 for r in radii)
    assert not math.isclose(min(radii), max(radii))
