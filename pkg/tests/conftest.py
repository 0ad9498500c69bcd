"""Shared domains and grids for the tests."""
import numpy as np
import pytest

from polygreen.geometry.domain import Domain, DomainKind


@pytest.fixture
def unit_ball_3d() -> Domain:
    return Domain(kind=DomainKind.UNIT_BALL, n=3)


@pytest.fixture
def unit_disk() -> Domain:
    return Domain(kind=DomainKind.UNIT_BALL, n=2)


@pytest.fixture
def unit_square() -> Domain:
    return Domain(kind=DomainKind.RECTANGLE, n=2, shape=(1.0, 1.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(1234))
