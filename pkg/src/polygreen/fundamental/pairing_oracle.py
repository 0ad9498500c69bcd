"""Distributional pairing of radial kernels with polynomial bumps.

A kernel K solves (-Delta)^m (C K) = delta exactly when
C * integral of K (-Delta)^m phi = phi(0) for every test function phi.
The test functions used here are the radial polynomial bumps
psi(s) = (1 - s^2/rho^2)^k, k >= 2m+2, whose polyharmonic images are
computed exactly with numpy polynomials.
"""
import math
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, special
from typeguard import typechecked


@typechecked
def sphere_area(*, n: int) -> float:
    """Returns the surface area of the unit sphere in R^n."""
    return float(2 * math.pi ** (n / 2) / special.gamma(n / 2))


@typechecked
def radial_bump(*, rho: float, k: int) -> Polynomial:
    """Returns (1 - s^2/rho^2)^k as a polynomial in s."""
    return Polynomial([1.0, 0.0, -1.0 / rho**2]) ** k


@typechecked
def radial_laplacian(*, profile: Polynomial, n: int) -> Polynomial:
    """Returns p'' + (n-1) p'/s for an even polynomial profile p."""
    first = profile.deriv()
    if len(first.coef) > 1 and abs(first.coef[0]) > 1e-14 * max(
        1.0, float(np.max(np.abs(first.coef)))
    ):
        raise ValueError("Error, radial profile must be an even polynomial.")
    shifted = Polynomial(first.coef[1:]) if len(first.coef) > 1 else 0 * first
    return profile.deriv(2) + (n - 1) * shifted


@typechecked
def polyharmonic_profile(*, profile: Polynomial, m: int, n: int) -> Polynomial:
    """Returns the radial profile of (-Delta)^m applied to profile."""
    result = profile
    for _ in range(m):
        result = -radial_laplacian(profile=result, n=n)
    return result


@typechecked
def radial_pairing(
    *,
    kernel: Callable[[float], float],
    m: int,
    n: int,
    rho: float = 1.0,
    k: int = 0,
) -> float:
    """Returns the integral over R^n of K(|x|) (-Delta)^m psi(|x|).

    :param kernel: Radial kernel K(s), integrable against s^(n-1) at 0.
    :param k: Bump exponent, 0 selects 2m+2.
    """
    exponent = k if k > 0 else 2 * m + 2
    image = polyharmonic_profile(
        profile=radial_bump(rho=rho, k=exponent), m=m, n=n
    )
    value, _ = integrate.quad(
        lambda s: s ** (n - 1) * kernel(s) * image(s),
        0.0,
        rho,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=400,
    )
    return sphere_area(n=n) * value


