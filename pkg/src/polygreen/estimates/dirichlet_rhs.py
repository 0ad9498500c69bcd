"""Right-hand sides of the pointwise and L^p bounds for the Dirichlet
problem (-Delta)^m u = sum c_alpha d^alpha f_alpha with |alpha| <= lambda.

The pointwise bound integrates d(y)^(lambda-|alpha|) |f_alpha(y)| against
1/|x-y| in odd dimensions and against log(1 + d(y)/|x-y|) in even
dimensions. Integrals are sums over grid cells; the cell holding x is
integrated exactly in the radial variable on the pyramids spanned by its
faces.
"""
import math
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from numpy.polynomial import legendre
from typeguard import typechecked

from polygreen.exceptions import SpecMismatchError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.geometry.domain import Domain
from polygreen.solver.grid import DiscreteField

FACE_NODES = 12
RADIAL_NODES = 24

DataEntry = Tuple[MultiIndex, DiscreteField]


@lru_cache(maxsize=None)
def _face_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Returns Gauss-Legendre nodes w on [-1/2, 1/2]^(n-1) with weights,
    plus the distance sqrt(|w|^2 + 1/4) of each node to the cell center."""
    nodes, weights = legendre.leggauss(FACE_NODES)
    nodes, weights = nodes / 2, weights / 2
    grids = np.meshgrid(*([nodes] * (n - 1)), indexing="ij")
    wgrids = np.meshgrid(*([weights] * (n - 1)), indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=1)
    weight = np.prod(np.stack([g.reshape(-1) for g in wgrids]), axis=0)
    return np.sqrt(np.sum(points**2, axis=1) + 0.25), weight


@typechecked
def cell_integral(
    *, n: int, h: float, func: Callable[[np.ndarray], np.ndarray]
) -> float:
    """Returns the integral of func(|z|) over the cube of side h centered
    at 0.

    The cube splits into 2n pyramids with apex 0; on each, z = t h (w, 1/2)
    with Jacobian t^(n-1) h^n / 2.
    """
    rho, face_weight = _face_rule(n)
    t, t_weight = legendre.leggauss(RADIAL_NODES)
    t, t_weight = (t + 1) / 2, t_weight / 2
    radii = h * np.outer(rho, t)
    inner = func(radii) * t ** (n - 1)
    total = float(np.sum(face_weight[:, None] * t_weight[None, :] * inner))
    return 2 * n * 0.5 * h**n * total


@typechecked
def diagonal_cell_constant(*, n: int) -> float:
    """Returns the integral of 1/|u| over the unit cube centered at 0."""
    return cell_integral(n=n, h=1.0, func=lambda r: 1 / r)


def _check_data(params: DimensionParams, data: List[DataEntry]) -> None:
    grids = {id(field.grid) for _, field in data}
    if len(grids) > 1:
        raise ValueError("Error, data fields live on different grids.")
    for alpha, _ in data:
        if alpha.order > params.lam:
            raise SpecMismatchError(
                f"Error, |alpha|={alpha.order} exceeds the critical order "
                + f"{params.lam} for m={params.m}, n={params.n}"
            )


@typechecked
def dirichlet_rhs(
    *,
    params: DimensionParams,
    x: np.ndarray,
    data: List[DataEntry],
    domain: Domain,
    epsilon: float = 0.0,
) -> float:
    """Returns the right-hand side of the pointwise Dirichlet bound at x
    with C = 1.

    :param x: Evaluation point, snapped to its grid node.
    :param data: Pairs (alpha, f_alpha) on one grid.
    :param epsilon: Even n only; when positive, (d(y)/|x-y|)^epsilon
    replaces log(1 + d(y)/|x-y|).
    """
    if not data:
        return 0.0
    _check_data(params, data)
    grid = data[0][1].grid
    if grid.domain != domain:
        raise ValueError(f"Error, data grid belongs to {grid.domain}")
    if epsilon and (params.is_odd or not 0 < epsilon < 1):
        raise ValueError(
            f"Error, epsilon:{epsilon} needs even n and 0 < epsilon < 1."
        )
    node = grid.snap_interior(point=np.asarray(x, dtype=float))
    x_node = grid.node_point(index=node)
    points = grid.coordinates()[grid.interior]
    dist = grid.distance[grid.interior]
    sep = np.linalg.norm(points - x_node, axis=1)
    off = sep > 0
    weight = np.zeros_like(sep)
    d_x = float(grid.distance[node])
    if params.is_odd:
        weight[off] = grid.h**grid.n / sep[off]
        diagonal = diagonal_cell_constant(n=grid.n) * grid.h ** (grid.n - 1)
    elif epsilon:
        weight[off] = grid.h**grid.n * (dist[off] / sep[off]) ** epsilon
        diagonal = cell_integral(
            n=grid.n, h=grid.h, func=lambda r: (d_x / r) ** epsilon
        )
    else:
        weight[off] = grid.h**grid.n * np.log1p(dist[off] / sep[off])
        diagonal = cell_integral(
            n=grid.n, h=grid.h, func=lambda r: np.log1p(d_x / r)
        )
    weight[~off] = diagonal
    total = 0.0
    for alpha, field in data:
        values = np.abs(field.values[grid.interior])
        power = dist ** float(params.lam - alpha.order)
        total += float(np.sum(weight * power * values))
    return total


@typechecked
def data_lp_norm(
    *,
    params: DimensionParams,
    data: List[DataEntry],
    p: float,
    epsilon: float = 0.5,
) -> float:
    """Returns sum over alpha of ||d^k f_alpha||_p with k = lambda-1-|alpha|
    for odd n and k = lambda-|alpha|+epsilon for even n.

    :param p: Exponent, p > n/(n-1) for odd n and p > n/(n-epsilon) for
    even n.
    """
    if not data:
        return 0.0
    _check_data(params, data)
    n = params.n
    threshold = n / (n - 1) if params.is_odd else n / (n - epsilon)
    if p <= threshold:
        raise ValueError(f"Error, p={p} must exceed {threshold}")
    grid = data[0][1].grid
    dist = grid.distance[grid.interior]
    total = 0.0
    for alpha, field in data:
        shift = -1.0 if params.is_odd else epsilon
        power = dist ** (params.lam - alpha.order + shift)
        values = np.abs(field.values[grid.interior]) * power
        total += math.pow(grid.h**n * float(np.sum(values**p)), 1 / p)
    return total
