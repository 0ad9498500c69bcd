"""Discrete Green functions, their regular parts and derivatives in the
source point.

Columns of the discrete Green matrix are solved against the single node
impulse h^-n and cached, so y-derivatives by source-stencil differencing
reuse the one factorisation.
"""
import logging
import threading
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from typeguard import typechecked

from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
    multi_indices,
    multinomial_weight,
)
from polygreen.fundamental.fundamental_solution import gamma_values
from polygreen.solver.differences import point_stencil
from polygreen.solver.grid import DiscreteField, field_from_interior
from polygreen.solver.operator import DiscreteOperator

logger = logging.getLogger(__name__)

SOURCE_MIN_NODES = 4


@typechecked
def discrete_green(*, op: DiscreteOperator, y: np.ndarray) -> DiscreteField:
    """Returns x -> G_h(x, y) with y snapped to its nearest node.

    Raises TooCloseToBoundaryError when the node of y lies within 4h of
    the boundary.
    """
    grid = op.grid
    node = grid.snap_interior(
        point=np.asarray(y, dtype=float),
        min_distance=SOURCE_MIN_NODES * grid.h,
    )
    snap = float(np.linalg.norm(grid.node_point(index=node) - y))
    logger.debug("Snapped source %s to node %s, distance %g.", y, node, snap)
    return GreenColumns(op=op).column(node=node)


@typechecked
def regular_part(
    *,
    green: DiscreteField,
    params: DimensionParams,
    diam: float,
    y: Optional[np.ndarray] = None,
) -> DiscreteField:
    """Returns S_h(x, y) = G_h(x, y) - Gamma(x - y) on the whole box.

    At the source node Gamma is replaced by its limit 0 when 2m > n and
    left undefined (NaN) otherwise.

    :param y: Source point, checked against the source node of green.
    """
    if green.source is None:
        raise ValueError("Error, field is not a Green function column.")
    grid = green.grid
    if y is not None and grid.snap(point=np.asarray(y)) != green.source:
        raise ValueError(
            f"Error, y={y} does not snap to the source node {green.source}"
        )
    y = grid.node_point(index=green.source)
    points = grid.coordinates().reshape(-1, grid.n) - y
    gamma = gamma_values(params=params, points=points, diam=diam)
    gamma = gamma.reshape(grid.shape)
    if params.homogeneity > 0:
        gamma[green.source] = 0.0
    return DiscreteField(
        grid=grid, values=green.values - gamma, source=green.source
    )


class GreenColumns:
    """Cache of discrete Green columns keyed by source node.

    Columns are full box fields, so callers working through many sources
    prefetch a batch, read what they need and clear the cache.
    """

    @typechecked
    def __init__(self, *, op: DiscreteOperator) -> None:
        self.op = op
        self._cache: Dict[Tuple[int, ...], DiscreteField] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._cache)

    def clear(self) -> None:
        """Drops every cached column."""
        with self._lock:
            self._cache.clear()

    @typechecked
    def prefetch(self, *, nodes: List[Tuple[int, ...]]) -> None:
        """Solves for every missing column in one batched solve."""
        grid = self.op.grid
        with self._lock:
            missing = sorted({n for n in nodes if n not in self._cache})
        if not missing:
            return
        lookup = grid.flat_to_interior()
        rhs = np.zeros((grid.interior_count, len(missing)))
        for col, node in enumerate(missing):
            row = lookup[np.ravel_multi_index(node, grid.shape)]
            if row < 0:
                raise ValueError(f"Error, source node {node} is not interior.")
            rhs[row, col] = grid.h ** (-grid.n)
        logger.info("Solving %d Green columns.", len(missing))
        solution = self.op.solve_many(rhs=rhs)
        with self._lock:
            for col, node in enumerate(missing):
                self._cache[node] = field_from_interior(
                    grid=grid,
                    interior_values=solution[:, col],
                    source=node,
                )

    @typechecked
    def column(self, *, node: Tuple[int, ...]) -> DiscreteField:
        """Returns the Green column of a source node."""
        self.prefetch(nodes=[node])
        return self._cache[node]

    @typechecked
    def source_stencil_nodes(
        self, *, node: Tuple[int, ...], alphas: List[MultiIndex]
    ) -> List[Tuple[int, ...]]:
        """Returns the source nodes that y-derivatives at node need."""
        nodes = set()
        for alpha in alphas:
            for offset, _ in point_stencil(multi=alpha, h=self.op.grid.h):
                nodes.add(tuple(i + o for i, o in zip(node, offset)))
        return sorted(nodes)

    @typechecked
    def y_derivative(
        self, *, node: Tuple[int, ...], alpha: MultiIndex
    ) -> DiscreteField:
        """Returns x -> d_y^alpha G_h(x, y) at the source node by centered
        differencing over neighbouring source nodes."""
        stencil = point_stencil(multi=alpha, h=self.op.grid.h)
        sources = [
            tuple(i + o for i, o in zip(node, offset)) for offset, _ in stencil
        ]
        self.prefetch(nodes=sources)
        values = np.zeros(self.op.grid.shape)
        for source, (_, weight) in zip(sources, stencil):
            values = values + weight * self._cache[source].values
        return DiscreteField(grid=self.op.grid, values=values, source=node)

    @typechecked
    def kernel(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Returns G_h(x, y) for rows of node points; the columns of every
        y must have been prefetched."""
        grid = self.op.grid
        out = np.empty(len(xs))
        for row, (x, y) in enumerate(zip(xs, ys)):
            out[row] = self._cache[grid.snap(point=y)].values[
                grid.snap(point=x)
            ]
        return out


PairKernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


@typechecked
def subtract_gamma(
    *, kernel: PairKernel, params: DimensionParams, diam: float
) -> PairKernel:
    """Returns the kernel (x, y) -> kernel(x, y) - Gamma(x - y)."""

    def regular(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        gamma = gamma_values(params=params, points=xs - ys, diam=diam)
        if params.homogeneity > 0:
            gamma = np.where(np.all(xs == ys, axis=1), 0.0, gamma)
        return kernel(xs, ys) - gamma

    return regular


@typechecked
def stencil_mixed_value(
    *,
    kernel: PairKernel,
    x: np.ndarray,
    y: np.ndarray,
    beta: MultiIndex,
    gamma: MultiIndex,
    h: float,
) -> float:
    """Returns d_x^beta d_y^gamma of a two-point kernel by centered
    differences in both points."""
    x_stencil = point_stencil(multi=beta, h=h)
    y_stencil = point_stencil(multi=gamma, h=h)
    xs, ys, weights = [], [], []
    for x_offset, x_weight in x_stencil:
        for y_offset, y_weight in y_stencil:
            xs.append(x + h * np.array(x_offset, dtype=float))
            ys.append(y + h * np.array(y_offset, dtype=float))
            weights.append(x_weight * y_weight)
    values = kernel(np.array(xs), np.array(ys))
    return float(np.dot(np.array(weights), values))


@typechecked
def stencil_mixed_norm(
    *,
    kernel: PairKernel,
    x: np.ndarray,
    y: np.ndarray,
    i: int,
    j: int,
    h: float,
) -> float:
    """Returns |nabla_x^i nabla_y^j K(x, y)| with multinomial weights."""
    n = len(x)
    total = 0.0
    for beta in multi_indices(n=n, order=i):
        for gamma in multi_indices(n=n, order=j):
            value = stencil_mixed_value(
                kernel=kernel, x=x, y=y, beta=beta, gamma=gamma, h=h
            )
            total += (
                multinomial_weight(multi=beta)
                * multinomial_weight(multi=gamma)
                * value**2
            )
    return float(np.sqrt(total))
