"""Closed-form Green functions of balls.

The method of images gives the Laplacian Green function; the classical
formula of Boggio gives the clamped Green function of (-Delta)^m,

    G(x, y) = k |x - y|^(2m-n) integral_1^A (v^2 - 1)^(m-1) v^(1-n) dv,
    A(x, y) = sqrt(|x|^2 |y|^2 - 2 x.y + 1) / |x - y|,

in the unit ball. Balls of radius R follow by scaling.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, special
from typeguard import typechecked

from polygreen.exceptions import CoincidentPointsError
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.fundamental.pairing_oracle import radial_pairing, sphere_area
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.solver.green import discrete_green
from polygreen.solver.grid import DiscreteField, GridSpec
from polygreen.solver.operator import assemble_operator

logger = logging.getLogger(__name__)

SERIES_CUTOFF = 1e-3
SERIES_TERMS = 8
CALIBRATION_RADIUS = 0.5


def _reflection_distance(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Returns sqrt(|x|^2 |y|^2 - 2 x.y + 1), the distance |y| |x - y*|."""
    value = (
        np.sum(xs**2, axis=1) * np.sum(ys**2, axis=1)
        - 2 * np.sum(xs * ys, axis=1)
        + 1
    )
    return np.sqrt(np.maximum(value, 0.0))


def _check_distinct(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    sep = np.linalg.norm(xs - ys, axis=1)
    if np.any(sep == 0):
        raise CoincidentPointsError(
            "Error, ball Green functions are singular at x = y."
        )
    return sep


@typechecked
def laplace_green_values(
    *, n: int, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Returns the unit-ball Laplacian Green function at rows of (x, y)."""
    xs, ys = np.atleast_2d(xs), np.atleast_2d(ys)
    sep = _check_distinct(xs, ys)
    image = _reflection_distance(xs, ys)
    if n == 2:
        return np.log(image / sep) / (2 * math.pi)
    coefficient = 1.0 / ((n - 2) * sphere_area(n=n))
    return coefficient * (sep ** (2 - n) - image ** (2 - n))


@typechecked
def laplace_green_ball(*, n: int, x: np.ndarray, y: np.ndarray) -> float:
    """Returns the Green function of -Delta in the unit ball of R^n."""
    return float(laplace_green_values(n=n, xs=x, ys=y)[0])


@lru_cache(maxsize=None)
def _series_coefficients(m: int, n: int) -> np.ndarray:
    """Returns coefficients in t of the antiderivative of
    t^(m-1) (2+t)^(m-1) (1+t)^(1-n), truncated."""
    binomial = Polynomial(
        [special.binom(1 - n, k) for k in range(SERIES_TERMS)]
    )
    product = (Polynomial([2.0, 1.0]) ** (m - 1) * binomial).coef[
        :SERIES_TERMS
    ]
    shifted = np.concatenate([np.zeros(m - 1), product])
    return Polynomial(shifted).integ().coef


@typechecked
def boggio_integral(*, m: int, n: int, a: float) -> float:
    """Returns the integral from 1 to a of (v^2 - 1)^(m-1) v^(1-n)."""
    t = a - 1.0
    if t <= 0:
        return 0.0
    if t < SERIES_CUTOFF:
        return float(Polynomial(_series_coefficients(m, n))(t))
    value, _ = integrate.quad(
        lambda v: (v * v - 1) ** (m - 1) * v ** (1 - n),
        1.0,
        a,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    return float(value)


@lru_cache(maxsize=None)
def boggio_constant(m: int, n: int) -> float:
    """Returns k_{m,n}, calibrated by pairing G(., 0) with a bump in
    B_{1/2}."""
    DimensionParams(m=m, n=n)
    integral = radial_pairing(
        kernel=lambda s: s ** (2 * m - n)
        * boggio_integral(m=m, n=n, a=1.0 / s),
        m=m,
        n=n,
        rho=CALIBRATION_RADIUS,
    )
    constant = 1.0 / integral
    logger.debug("Boggio constant k_{%d,%d} = %.17g.", m, n, constant)
    return constant


@typechecked
def boggio_green_values(
    *, m: int, n: int, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Returns Boggio's Green function at rows of (x, y)."""
    xs, ys = np.atleast_2d(xs), np.atleast_2d(ys)
    sep = _check_distinct(xs, ys)
    ratio = _reflection_distance(xs, ys) / sep
    integrals = np.array(
        [boggio_integral(m=m, n=n, a=float(a)) for a in ratio]
    )
    return boggio_constant(m, n) * sep ** float(2 * m - n) * integrals


@typechecked
def boggio_green_ball(
    *, m: int, n: int, x: np.ndarray, y: np.ndarray
) -> float:
    """Returns the Green function of (-Delta)^m in the unit ball."""
    return float(boggio_green_values(m=m, n=n, xs=x, ys=y)[0])


@dataclass(frozen=True)
class BallOracle:
    """Closed-form Green function of the ball of a radius about 0."""

    m: int
    n: int
    radius: float = 1.0

    def __post_init__(self) -> None:
        DimensionParams(m=self.m, n=self.n)
        if self.radius <= 0:
            raise ValueError(
                f"Error, ball radius must be positive, got:{self.radius}"
            )

    @typechecked
    def values(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Returns G_R(x, y) = R^(2m-n) G_1(x/R, y/R) at rows of (x, y)."""
        xs = np.atleast_2d(xs) / self.radius
        ys = np.atleast_2d(ys) / self.radius
        if self.m == 1:
            unit = laplace_green_values(n=self.n, xs=xs, ys=ys)
        else:
            unit = boggio_green_values(m=self.m, n=self.n, xs=xs, ys=ys)
        return self.radius ** float(2 * self.m - self.n) * unit

    @typechecked
    def green(self, *, x: np.ndarray, y: np.ndarray) -> float:
        """Returns G_R(x, y)."""
        return float(self.values(np.atleast_2d(x), np.atleast_2d(y))[0])


@dataclass(frozen=True)
class OracleComparison:
    """Relative errors of a discrete Green column against an oracle."""

    max_relative_error: float
    l2_relative_error: float
    node_count: int


@typechecked
def sample_oracle(
    *, oracle: BallOracle, grid: GridSpec, y: np.ndarray
) -> DiscreteField:
    """Returns the oracle column x -> G(x, y) on the interior nodes, with
    y moved to its nearest node."""
    source = grid.snap(point=y)
    y = grid.node_point(index=source)
    points = grid.coordinates()[grid.interior]
    keep = np.linalg.norm(points - y, axis=1) > 0
    values = np.zeros(grid.shape)
    column = np.zeros(len(points))
    column[keep] = oracle.values(
        points[keep], np.repeat(np.atleast_2d(y), int(keep.sum()), axis=0)
    )
    values[grid.interior] = column
    return DiscreteField(grid=grid, values=values, source=source)


@typechecked
def oracle_compare(
    *,
    numeric: DiscreteField,
    oracle: BallOracle,
    y: np.ndarray,
    exclusion: float,
) -> OracleComparison:
    """Compares a Green column with the oracle on interior nodes at least
    exclusion away from y and from the boundary.

    The oracle is evaluated at the source node of the column, the point
    the discrete problem was actually solved for, whenever it has one.
    """
    grid = numeric.grid
    if numeric.source is not None:
        y = grid.node_point(index=numeric.source)
    points = grid.coordinates()[grid.interior]
    keep = (np.linalg.norm(points - y, axis=1) >= exclusion) & (
        grid.distance[grid.interior] >= exclusion
    )
    if not np.any(keep):
        raise ValueError(
            f"Error, no nodes remain after excluding {exclusion} around y."
        )
    points = points[keep]
    reference = oracle.values(
        points, np.repeat(np.atleast_2d(y), len(points), axis=0)
    )
    error = numeric.values[grid.interior][keep] - reference
    return OracleComparison(
        max_relative_error=float(np.max(np.abs(error) / np.abs(reference))),
        l2_relative_error=float(
            np.linalg.norm(error) / np.linalg.norm(reference)
        ),
        node_count=int(keep.sum()),
    )


@dataclass(frozen=True)
class OracleConvergence:
    """Oracle errors of the solver on successive grid levels."""

    levels: List[float]
    errors: List[float]

    @property
    def orders(self) -> List[float]:
        """Measured orders log(e_h / e_h') / log(h / h') of consecutive
        levels."""
        return [
            math.log(self.errors[k] / self.errors[k + 1])
            / math.log(self.levels[k] / self.levels[k + 1])
            for k in range(len(self.levels) - 1)
        ]


@typechecked
def oracle_convergence(
    *,
    domain: Domain,
    m: int,
    y: np.ndarray,
    levels: List[float],
    exclusion: float,
    boundary: str = "zero-extension",
) -> OracleConvergence:
    """Returns the max relative oracle error of the discrete Green column
    of y on every level of a unit ball.

    :param boundary: Boundary treatment of the operator, see
    DiscreteOperator.
    """
    if domain.kind != DomainKind.UNIT_BALL:
        raise ValueError(f"Error, no closed-form Green function for {domain}")
    if len(levels) < 2:
        raise ValueError(f"Error, need at least 2 levels, got:{levels}")
    oracle = BallOracle(m=m, n=domain.n)
    errors = []
    for h in levels:
        op = assemble_operator(domain=domain, m=m, h=h, boundary=boundary)
        comparison = oracle_compare(
            numeric=discrete_green(op=op, y=y),
            oracle=oracle,
            y=y,
            exclusion=exclusion,
        )
        logger.info(
            "Oracle error at h=%g: max %.3e, l2 %.3e.",
            h,
            comparison.max_relative_error,
            comparison.l2_relative_error,
        )
        errors.append(comparison.max_relative_error)
    return OracleConvergence(levels=list(levels), errors=errors)
