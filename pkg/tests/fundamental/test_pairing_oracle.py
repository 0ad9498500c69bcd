import math

import numpy as np
import pytest

from polygreen.fundamental.pairing_oracle import (
    polyharmonic_profile,
    radial_bump,
    radial_laplacian,
    sphere_area,
)


@pytest.mark.parametrize(
    "n,area", [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)]
)
def test_sphere_area(n, area):
    assert sphere_area(n=n) == pytest.approx(area)


def test_radial_laplacian_of_a_quadratic():
    # Delta |x|^2 = 2n
    profile = radial_bump(rho=1.0, k=1)
    assert radial_laplacian(profile=profile, n=3)(0.4) == pytest.approx(-6.0)


def test_bump_vanishes_at_its_radius():
    image = polyharmonic_profile(
        profile=radial_bump(rho=0.5, k=6), m=2, n=3
    )
    assert image(0.5) == pytest.approx(0.0, abs=1e-6)
    assert np.isfinite(image(0.0))
