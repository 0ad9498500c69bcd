"""Uniform lattices h Z^n restricted to a box around a domain, and fields
sampled on them."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from typeguard import typechecked

from polygreen.exceptions import (
    GridTooCoarseError,
    PointOutsideDomainError,
    TooCloseToBoundaryError,
)
from polygreen.geometry.domain import Domain

logger = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 97**3
MIN_NODES_ACROSS = 8


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Nodes h*k of a box that covers the domain plus m+1 ghost layers.

    distance holds the signed boundary distance of every box node and
    interior marks the nodes strictly inside the domain.
    """

    domain: Domain
    h: float
    depth: int
    low_index: np.ndarray = field(repr=False)
    shape: Tuple[int, ...]
    distance: np.ndarray = field(repr=False)
    interior: np.ndarray = field(repr=False)
    interior_flat: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        """Space dimension."""
        return self.domain.n

    @property
    def interior_count(self) -> int:
        """Number of interior nodes."""
        return int(self.interior_flat.size)

    @typechecked
    def coordinates(self) -> np.ndarray:
        """Returns the coordinates of all box nodes, shape (*shape, n)."""
        axes = [
            self.h * (self.low_index[k] + np.arange(self.shape[k]))
            for k in range(self.n)
        ]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    @typechecked
    def node_point(self, *, index: Tuple[int, ...]) -> np.ndarray:
        """Returns the coordinates of a box node."""
        return self.h * (self.low_index + np.array(index, dtype=float))

    @typechecked
    def snap(self, *, point: np.ndarray) -> Tuple[int, ...]:
        """Returns the box index of the node nearest to point."""
        index = np.rint(np.asarray(point) / self.h).astype(int)
        local = index - self.low_index
        if np.any(local < 0) or np.any(local >= np.array(self.shape)):
            raise PointOutsideDomainError(
                f"Error, point:{point} lies outside the grid box."
            )
        return tuple(int(i) for i in local)

    @typechecked
    def snap_interior(
        self, *, point: np.ndarray, min_distance: float = 0.0
    ) -> Tuple[int, ...]:
        """Snaps a point to an interior node at least min_distance away from
        the boundary."""
        index = self.snap(point=point)
        dist = float(self.distance[index])
        if dist <= 0:
            raise PointOutsideDomainError(
                f"Error, point:{point} does not snap to an interior node."
            )
        if dist < min_distance:
            raise TooCloseToBoundaryError(
                f"Error, node of point:{point} has boundary distance {dist}"
                + f" < {min_distance}"
            )
        return index

    @typechecked
    def flat_to_interior(self) -> np.ndarray:
        """Returns the interior number of every box node, -1 outside."""
        lookup = -np.ones(int(np.prod(self.shape)), dtype=int)
        lookup[self.interior_flat] = np.arange(self.interior_count)
        return lookup


@typechecked
def build_grid(
    *,
    domain: Domain,
    h: float,
    depth: int,
    node_cap: int = DEFAULT_NODE_CAP,
) -> GridSpec:
    """Builds the lattice of width h for a domain.

    :param depth: Number of ghost layers the operator needs, m for
    (-Delta)^m. The box carries one more layer for stencils.
    :param node_cap: Largest admissible number of interior nodes.
    """
    if h <= 0:
        raise ValueError(f"Error, mesh width must be positive, got:{h}")
    if domain.narrowest_width < MIN_NODES_ACROSS * h:
        raise GridTooCoarseError(
            f"Error, h={h} leaves fewer than {MIN_NODES_ACROSS} nodes across "
            + f"the narrowest feature of {domain}."
        )
    low, high = domain.bounding_box()
    pad = depth + 1
    low_index = np.array(
        [math.floor(v / h) - pad for v in low], dtype=float
    )
    high_index = np.array([math.ceil(v / h) + pad for v in high], dtype=float)
    shape = tuple(int(c) for c in high_index - low_index + 1)
    axes = [h * (low_index[k] + np.arange(shape[k])) for k in range(domain.n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    distance = domain.signed_distance(points=mesh.reshape(-1, domain.n))
    distance = distance.reshape(shape)
    interior = distance > 0
    interior_flat = np.flatnonzero(interior)
    if interior_flat.size > node_cap:
        raise ValueError(
            f"Error, {interior_flat.size} interior nodes exceed the cap "
            + f"{node_cap}; use a coarser h or raise node_cap."
        )
    logger.debug(
        "Grid h=%g for %s: box %s, %d interior nodes.",
        h,
        domain,
        shape,
        interior_flat.size,
    )
    return GridSpec(
        domain=domain,
        h=float(h),
        depth=int(depth),
        low_index=low_index,
        shape=shape,
        distance=distance,
        interior=interior,
        interior_flat=interior_flat,
    )


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """Values on every node of a grid box.

    Green functions and solutions vanish off the interior nodes. Regular
    parts carry -Gamma there. source is the node of a unit impulse, if any.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    source: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"Error, field shape {self.values.shape} does not match the "
                + f"grid box {self.grid.shape}"
            )

    @typechecked
    def interior_values(self) -> np.ndarray:
        """Returns the values at interior nodes in interior order."""
        return self.values.reshape(-1)[self.grid.interior_flat]

    @typechecked
    def value_at(self, *, point: np.ndarray) -> float:
        """Returns the value at the node nearest to point."""
        return float(self.values[self.grid.snap(point=point)])

    @typechecked
    def scaled(self, *, factor: float) -> "DiscreteField":
        """Returns factor times the field."""
        return DiscreteField(
            grid=self.grid, values=factor * self.values, source=self.source
        )


@typechecked
def field_from_interior(
    *,
    grid: GridSpec,
    interior_values: np.ndarray,
    source: Optional[Tuple[int, ...]] = None,
) -> DiscreteField:
    """Returns the zero extension of interior values to the grid box."""
    values = np.zeros(int(np.prod(grid.shape)))
    values[grid.interior_flat] = interior_values
    return DiscreteField(
        grid=grid, values=values.reshape(grid.shape), source=source
    )


@typechecked
def sample_function(
    *,
    grid: GridSpec,
    func: Callable[[np.ndarray], np.ndarray],
    interior_only: bool = True,
) -> DiscreteField:
    """Samples func(points) -> values on the grid nodes."""
    points = grid.coordinates().reshape(-1, grid.n)
    values = np.asarray(func(points), dtype=float).reshape(grid.shape)
    if interior_only:
        values = np.where(grid.interior, values, 0.0)
    return DiscreteField(grid=grid, values=values)
