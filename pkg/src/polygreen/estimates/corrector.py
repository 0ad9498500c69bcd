"""The corrector R_alpha(x, y) = d_y^alpha G(x, y) - eta((x-y)/d(y)) F_alpha
and its source f_alpha = (-Delta_x)^m R_alpha.

F_alpha(z) is the alpha-th y-derivative of the fundamental solution with
the diameter of the even-dimension logarithm replaced by d(y), that is
P^alpha(z) log(d(y)/|z|) + Q^alpha(z). Since (-Delta)^m F_alpha vanishes
off the pole, the source is

    f_alpha = -(-1)^m Delta^m (eta F_alpha),

supported in the annulus d(y)/4 <= |x-y| <= d(y)/2. It is computed from
the symbolic product rule, never by applying the lattice operator.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
import sympy as sp
from typeguard import typechecked

from polygreen.estimates.cutoff import (
    CutoffCalculus,
    CutoffFunction,
    scale_symbol,
)
from polygreen.exceptions import SpecMismatchError, TooCloseToBoundaryError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.fundamental.fundamental_solution import cmn_constant
from polygreen.fundamental.symbolic import coordinates, derivative_expression
from polygreen.geometry.domain import Domain
from polygreen.solver.differences import energy_norm
from polygreen.solver.grid import DiscreteField, GridSpec
from polygreen.solver.green import GreenColumns
from polygreen.solver.operator import solve_dirichlet

logger = logging.getLogger(__name__)

MIN_SOURCE_NODES = 16
METHODS = ("difference", "solve")


@lru_cache(maxsize=None)
def corrector_singular_expression(
    m: int, n: int, components: Tuple[int, ...]
) -> sp.Expr:
    """Returns F_alpha in the symbols z and d."""
    _, diam = coordinates(n)
    sign = (-1) ** sum(components)
    full = derivative_expression(m, n, components)
    return sign * cmn_constant(m=m, n=n) * full.subs(diam, scale_symbol())


@lru_cache(maxsize=None)
def _masked_function(
    m: int, n: int, components: Tuple[int, ...]
) -> Callable[..., np.ndarray]:
    calculus = CutoffCalculus(n=n, order=0)
    return calculus.lambdify(
        calculus.h[0] * corrector_singular_expression(m, n, components)
    )


@lru_cache(maxsize=None)
def _source_function(
    m: int, n: int, components: Tuple[int, ...]
) -> Callable[..., np.ndarray]:
    calculus = CutoffCalculus(n=n, order=2 * m)
    expr = calculus.h[0] * corrector_singular_expression(m, n, components)
    for _ in range(m):
        expr = calculus.laplacian(expr)
    logger.debug(
        "Built the symbolic source for m=%d, n=%d, alpha=%s.",
        m,
        n,
        components,
    )
    return calculus.lambdify(-((-1) ** m) * expr)


def _check_alpha(params: DimensionParams, alpha: MultiIndex) -> None:
    if alpha.n != params.n:
        raise ValueError(
            f"Error, multi-index {alpha.components} does not fit n={params.n}"
        )
    if alpha.order > params.lam:
        raise SpecMismatchError(
            f"Error, |alpha|={alpha.order} exceeds the critical order "
            + f"{params.lam} for m={params.m}, n={params.n}"
        )


@typechecked
def _source_node(
    *, grid: GridSpec, domain: Domain, y: np.ndarray
) -> Tuple[Tuple[int, ...], np.ndarray, float]:
    """Returns the node of y, its coordinates and boundary distance."""
    if grid.domain != domain:
        raise ValueError(f"Error, grid belongs to {grid.domain}, not {domain}")
    node = grid.snap_interior(point=np.asarray(y, dtype=float))
    y_node = grid.node_point(index=node)
    scale = domain.distance_to_boundary(x=y_node)
    if scale < MIN_SOURCE_NODES * grid.h:
        raise TooCloseToBoundaryError(
            f"Error, d(y)={scale} is below {MIN_SOURCE_NODES}h="
            + f"{MIN_SOURCE_NODES * grid.h}"
        )
    return node, y_node, scale


@typechecked
def source_values(
    *,
    params: DimensionParams,
    alpha: MultiIndex,
    points: np.ndarray,
    scale: float,
    cutoff: CutoffFunction,
) -> np.ndarray:
    """Returns f_alpha at rows of points z = x - y for d(y) = scale.

    Values vanish off the open band scale/4 < |z| < scale/2.
    """
    _check_alpha(params, alpha)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    s = np.sum(pts**2, axis=1) / scale**2
    band = (s > 1 / 16) & (s < 1 / 4)
    out = np.zeros(len(pts))
    if not np.any(band):
        return out
    func = _source_function(params.m, params.n, alpha.components)
    calculus = CutoffCalculus(n=params.n, order=2 * params.m)
    out[band] = calculus.evaluate(
        funcs=[func],
        cutoff=cutoff,
        points=pts[band],
        scale=scale,
        diam=scale,
    )[0]
    return out


@typechecked
def corrector_source(
    *,
    params: DimensionParams,
    alpha: MultiIndex,
    y: np.ndarray,
    domain: Domain,
    cutoff: CutoffFunction,
    grid: GridSpec,
) -> DiscreteField:
    """Samples f_alpha(., y) on the grid, y snapped to its node.

    Raises TooCloseToBoundaryError when d(y) < 16h.
    """
    _check_alpha(params, alpha)
    node, y_node, scale = _source_node(grid=grid, domain=domain, y=y)
    points = grid.coordinates().reshape(-1, grid.n) - y_node
    values = source_values(
        params=params,
        alpha=alpha,
        points=points,
        scale=scale,
        cutoff=cutoff,
    )
    return DiscreteField(
        grid=grid,
        values=np.where(grid.interior, values.reshape(grid.shape), 0.0),
        source=node,
    )


@typechecked
def masked_singular_part(
    *,
    params: DimensionParams,
    alpha: MultiIndex,
    points: np.ndarray,
    scale: float,
    cutoff: CutoffFunction,
) -> np.ndarray:
    """Returns eta(z/scale) F_alpha(z) at rows of z, NaN where undefined."""
    _check_alpha(params, alpha)
    func = _masked_function(params.m, params.n, alpha.components)
    return CutoffCalculus(n=params.n, order=0).evaluate(
        funcs=[func],
        cutoff=cutoff,
        points=points,
        scale=scale,
        diam=scale,
    )[0]


def _fill_pole(values: np.ndarray, node: Tuple[int, ...]) -> None:
    """Replaces a non-finite value at node by the mean of its lattice
    neighbours."""
    if np.isfinite(values[node]):
        return
    neighbours = []
    for axis in range(values.ndim):
        for step in (-1, 1):
            index = list(node)
            index[axis] += step
            neighbours.append(values[tuple(index)])
    values[node] = float(np.mean(neighbours))


@typechecked
def corrector_field(
    *,
    params: DimensionParams,
    alpha: MultiIndex,
    y: np.ndarray,
    domain: Domain,
    cutoff: CutoffFunction,
    columns: GreenColumns,
    method: str = "difference",
) -> DiscreteField:
    """Returns the discrete corrector R_alpha(., y).

    :param columns: Green columns of the clamped operator on the grid.
    :param method: "difference" subtracts eta F_alpha from the source
    stencil y-derivative of G_h; "solve" solves the clamped problem with
    the symbolic source f_alpha.
    """
    if method not in METHODS:
        raise ValueError(
            f"Error, unknown corrector method:{method}, expected one of "
            + f"{METHODS}"
        )
    _check_alpha(params, alpha)
    op = columns.op
    if op.m != params.m:
        raise ValueError(
            f"Error, operator order {op.m} does not match m={params.m}"
        )
    grid = op.grid
    node, y_node, scale = _source_node(grid=grid, domain=domain, y=y)
    if method == "solve":
        source = corrector_source(
            params=params,
            alpha=alpha,
            y=y_node,
            domain=domain,
            cutoff=cutoff,
            grid=grid,
        )
        solution = solve_dirichlet(op=op, rhs=source)
        return DiscreteField(grid=grid, values=solution.values, source=node)
    derivative = columns.y_derivative(node=node, alpha=alpha)
    points = grid.coordinates().reshape(-1, grid.n) - y_node
    masked = masked_singular_part(
        params=params,
        alpha=alpha,
        points=points,
        scale=scale,
        cutoff=cutoff,
    ).reshape(grid.shape)
    values = derivative.values - masked
    _fill_pole(values, node)
    return DiscreteField(grid=grid, values=values, source=node)


@typechecked
def source_scale_product(
    *, source: DiscreteField, alpha: MultiIndex, scale: float
) -> float:
    """Returns sup|f_alpha| d(y)^(n+|alpha|), bounded independently of y."""
    return float(np.max(np.abs(source.values))) * scale ** (
        source.grid.n + alpha.order
    )


@typechecked
def corrector_energy_ratio(
    *,
    corrector: DiscreteField,
    params: DimensionParams,
    alpha: MultiIndex,
    scale: float,
) -> float:
    """Returns ||nabla^m R_alpha|| d(y)^(n/2 - m + |alpha|), bounded
    independently of y."""
    exponent = params.n / 2 - params.m + alpha.order
    return energy_norm(field=corrector, m=params.m) * math.pow(
        scale, exponent
    )
