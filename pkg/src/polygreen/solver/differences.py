"""Centered finite differences and the discrete energy and Hardy norms of
grid fields."""
import itertools
import math
from typing import List, Tuple

import numpy as np
from scipy import ndimage
from typeguard import typechecked

from polygreen.exceptions import TooCloseToBoundaryError, ZeroFieldError
from polygreen.fundamental.dimension_params import (
    MultiIndex,
    multi_indices,
    multinomial_weight,
)
from polygreen.solver.grid import DiscreteField

_SECOND = np.array([1.0, -2.0, 1.0])
_FIRST = np.array([-0.5, 0.0, 0.5])


@typechecked
def centered_weights(*, order: int) -> np.ndarray:
    """Returns the unscaled centered difference weights of an order, on
    offsets -order//2 - order%2 .. order//2 + order%2."""
    weights = np.array([1.0])
    if order % 2 == 1:
        weights = _FIRST.copy()
    for _ in range(order // 2):
        weights = np.convolve(weights, _SECOND)
    return weights


@typechecked
def point_stencil(
    *, multi: MultiIndex, h: float
) -> List[Tuple[Tuple[int, ...], float]]:
    """Returns (offset, weight) pairs of the tensor product stencil for
    d^multi, scaled by h^-|multi|; zero weights are dropped."""
    per_axis = []
    for order in multi.components:
        weights = centered_weights(order=order)
        half = len(weights) // 2
        per_axis.append(
            [(k - half, float(w)) for k, w in enumerate(weights) if w != 0]
        )
    scale = h ** (-multi.order)
    stencil = []
    for combo in itertools.product(*per_axis):
        offset = tuple(c[0] for c in combo)
        weight = scale * math.prod(c[1] for c in combo)
        stencil.append((offset, weight))
    return stencil


@typechecked
def mixed_derivative(
    *, field: DiscreteField, multi: MultiIndex
) -> DiscreteField:
    """Returns the centered difference d^multi of a field on the box.

    Nodes closer than |multi| h to the boundary, and nodes whose stencil
    leaves the box, hold NaN.
    """
    grid = field.grid
    values = field.values.astype(float)
    for axis, order in enumerate(multi.components):
        if order == 0:
            continue
        weights = centered_weights(order=order) / grid.h**order
        values = ndimage.correlate1d(
            values, weights, axis=axis, mode="constant", cval=np.nan
        )
    valid = grid.distance >= multi.order * grid.h
    return DiscreteField(
        grid=grid, values=np.where(valid, values, np.nan), source=field.source
    )


@typechecked
def derivative_at(
    *, field: DiscreteField, multi: MultiIndex, index: Tuple[int, ...]
) -> float:
    """Returns d^multi of the field at one box node."""
    grid = field.grid
    if float(grid.distance[index]) < multi.order * grid.h:
        raise TooCloseToBoundaryError(
            f"Error, node {index} is closer than {multi.order}h to the "
            + "boundary."
        )
    total = 0.0
    for offset, weight in point_stencil(multi=multi, h=grid.h):
        node = tuple(i + o for i, o in zip(index, offset))
        total += weight * float(field.values[node])
    return total


@typechecked
def derivative_norm(
    *, field: DiscreteField, i: int, multi: MultiIndex
) -> DiscreteField:
    """Returns |nabla^i d^multi u| = sqrt(sum over |beta| = i of
    i!/beta! (d^(beta+multi) u)^2) on the box."""
    total = np.zeros(field.grid.shape)
    for beta in multi_indices(n=field.grid.n, order=i):
        part = mixed_derivative(field=field, multi=beta + multi).values
        total = total + multinomial_weight(multi=beta) * part**2
    return DiscreteField(
        grid=field.grid, values=np.sqrt(total), source=field.source
    )


@typechecked
def _forward_difference(
    *, values: np.ndarray, multi: MultiIndex
) -> np.ndarray:
    result = values
    for axis, order in enumerate(multi.components):
        if order == 0:
            continue
        pad = [(0, 0)] * result.ndim
        pad[axis] = (order, order)
        result = np.diff(np.pad(result, pad), n=order, axis=axis)
    return result


@typechecked
def energy_norm(*, field: DiscreteField, m: int) -> float:
    """Returns the discrete norm of nabla^m u.

    Forward differences of the zero-extended interior values are summed
    with multinomial weights and quadrature weight h^n, so the square of
    the result equals u^T A u h^n for the clamped operator A.
    """
    grid = field.grid
    values = np.where(grid.interior, field.values, 0.0)
    total = 0.0
    for beta in multi_indices(n=grid.n, order=m):
        diff = _forward_difference(values=values, multi=beta)
        total += multinomial_weight(multi=beta) * float(np.sum(diff**2))
    return math.sqrt(total * grid.h ** (grid.n - 2 * m))


@typechecked
def weighted_l2_norm(
    *, field: DiscreteField, q: np.ndarray, power: float
) -> float:
    """Returns the discrete norm of u/|x - q|^power over interior nodes."""
    grid = field.grid
    points = grid.coordinates()[grid.interior]
    dist = np.linalg.norm(points - np.asarray(q), axis=1)
    values = field.values[grid.interior]
    return math.sqrt(
        grid.h**grid.n * float(np.sum(values**2 / dist ** (2 * power)))
    )


@typechecked
def hardy_ratio(*, field: DiscreteField, m: int, q: np.ndarray) -> float:
    """Returns ||v/|x - q|^m|| / ||nabla^m v|| for a boundary point q."""
    grid = field.grid
    if not np.any(field.values[grid.interior]):
        raise ZeroFieldError("Error, Hardy ratio of the zero field.")
    return weighted_l2_norm(field=field, q=q, power=m) / energy_norm(
        field=field, m=m
    )
