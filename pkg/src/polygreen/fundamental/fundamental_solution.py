"""Fundamental solution of (-Delta)^m in R^n for 2 <= n <= 2m+1.

Gamma(x) = C_{m,n} |x|^(2m-n) in odd dimensions and
Gamma(x) = C_{m,n} |x|^(2m-n) log(diam/|x|) in even dimensions. The
constant C_{m,n} is computed once by pairing the kernel with a
polynomial bump.
"""
import logging
import math
import threading
from functools import lru_cache

import numpy as np
from typeguard import typechecked

from polygreen.exceptions import SingularPointError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.fundamental.pairing_oracle import radial_pairing
from polygreen.fundamental.symbolic import derivative_expression, evaluate

logger = logging.getLogger(__name__)

_constant_lock = threading.Lock()


@typechecked
def radial_kernel(*, m: int, n: int, s: float, diam: float = 1.0) -> float:
    """Returns the unnormalised kernel s^(2m-n) or s^(2m-n) log(diam/s)."""
    value = s ** (2 * m - n)
    if n % 2 == 0:
        value *= math.log(diam / s)
    return float(value)


@lru_cache(maxsize=None)
def _cmn_constant(m: int, n: int) -> float:
    DimensionParams(m=m, n=n)
    integral = radial_pairing(
        kernel=lambda s: radial_kernel(m=m, n=n, s=s), m=m, n=n
    )
    constant = 1.0 / integral
    logger.debug("C_{%d,%d} = %.17g from the bump pairing.", m, n, constant)
    return constant


@typechecked
def cmn_constant(*, m: int, n: int) -> float:
    """Returns C_{m,n} such that (-Delta)^m Gamma = delta.

    The bump pairing of the kernel is computed on first use and cached.
    """
    with _constant_lock:
        return _cmn_constant(m, n)


@typechecked
def gamma_eval(
    *, params: DimensionParams, x: np.ndarray, diam: float = 1.0
) -> float:
    """Returns Gamma(x).

    :param diam: Diameter entering the logarithm, even n only.
    """
    r = float(np.linalg.norm(x))
    if r == 0:
        raise SingularPointError(
            f"Error, fundamental solution is singular at x={x}"
        )
    return cmn_constant(m=params.m, n=params.n) * radial_kernel(
        m=params.m, n=params.n, s=r, diam=diam
    )


@typechecked
def gamma_values(
    *, params: DimensionParams, points: np.ndarray, diam: float = 1.0
) -> np.ndarray:
    """Returns Gamma at every row of points, NaN at the origin."""
    r = np.linalg.norm(np.atleast_2d(points), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = r ** float(params.homogeneity)
        if not params.is_odd:
            values = values * np.log(diam / r)
    values[r == 0] = np.nan
    return cmn_constant(m=params.m, n=params.n) * values


@typechecked
def gamma_derivative(
    *,
    params: DimensionParams,
    alpha_x: MultiIndex,
    alpha_y: MultiIndex,
    x_minus_y: np.ndarray,
    diam: float = 1.0,
) -> float:
    """Returns the partial derivative d_x^alpha_x d_y^alpha_y of
    Gamma(x - y), by symbolic differentiation of the kernel."""
    if float(np.linalg.norm(x_minus_y)) == 0:
        raise SingularPointError(
            "Error, derivatives of the fundamental solution are singular "
            + f"at x-y={x_minus_y}"
        )
    return float(
        gamma_derivative_values(
            params=params,
            alpha_x=alpha_x,
            alpha_y=alpha_y,
            points=np.atleast_2d(x_minus_y),
            diam=diam,
        )[0]
    )


@typechecked
def gamma_derivative_values(
    *,
    params: DimensionParams,
    alpha_x: MultiIndex,
    alpha_y: MultiIndex,
    points: np.ndarray,
    diam: float = 1.0,
) -> np.ndarray:
    """Vectorised gamma_derivative over the rows of points (values of
    x - y). Rows at the origin give NaN."""
    total = alpha_x + alpha_y
    sign = (-1) ** alpha_y.order
    expr = derivative_expression(params.m, params.n, total.components)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    at_pole = np.linalg.norm(pts, axis=1) == 0
    safe = np.where(at_pole[:, None], 1.0, pts)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = evaluate(expr=expr, n=params.n, points=safe, diam=diam)
    values[at_pole] = np.nan
    return sign * cmn_constant(m=params.m, n=params.n) * values
