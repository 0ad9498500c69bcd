"""Pointwise and L^p bounds for (-Delta)^m u = sum_alpha d^alpha f_alpha.

The right-hand side is assembled from centered differences of the data,
the clamped problem is solved on every level and |nabla^lambda u| is
compared with the weighted potential of the data at sampled nodes. In
even dimensions the potential is also measured with (d(y)/|x-y|)^epsilon
in place of the logarithm.
"""
import logging
from typing import Callable, List, Tuple

import numpy as np
from typeguard import typechecked

from polygreen.estimates.dirichlet_rhs import (
    DataEntry,
    data_lp_norm,
    dirichlet_rhs,
)
from polygreen.estimates.report import CheckReport, refinement_stable
from polygreen.exceptions import EmptyInputError, SpecMismatchError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
    multi_indices,
)
from polygreen.geometry.domain import Domain
from polygreen.harness.verification_run import build_level
from polygreen.harness.verify_decay import BumpSource
from polygreen.solver.differences import derivative_norm, mixed_derivative
from polygreen.solver.grid import DiscreteField, GridSpec, sample_function
from polygreen.solver.operator import DiscreteOperator, solve_dirichlet

logger = logging.getLogger(__name__)

DataFunction = Tuple[MultiIndex, Callable[[np.ndarray], np.ndarray]]

EVALUATION_POINTS = 40
LP_EXPONENT = 2.0
EVEN_EPSILON = 0.5
SCALING = 10.0
LINEARITY_RTOL = 1e-9


@typechecked
def bump_data(
    *, domain: Domain, params: DimensionParams, seed: int
) -> List[DataFunction]:
    """Returns one smooth bump per multi-index of order <= lambda, centered
    at seeded interior points with radius half their boundary distance."""
    rng = np.random.Generator(np.random.Philox(seed))
    data: List[DataFunction] = []
    for order in range(params.lam + 1):
        for alpha in multi_indices(n=params.n, order=order):
            center = domain.sample_interior_point(rng=rng)
            rho = 0.5 * domain.distance_to_boundary(x=center)
            data.append((alpha, BumpSource(center=center, rho=rho).values))
    return data


def _data_fields(
    grid: GridSpec, data: List[DataFunction], factor: float
) -> List[DataEntry]:
    return [
        (alpha, sample_function(grid=grid, func=func).scaled(factor=factor))
        for alpha, func in data
    ]


@typechecked
def divergence_rhs(*, fields: List[DataEntry]) -> DiscreteField:
    """Returns sum_alpha d^alpha f_alpha by centered differences, zero
    where a stencil leaves the box."""
    grid = fields[0][1].grid
    total = np.zeros(grid.shape)
    for alpha, field in fields:
        part = mixed_derivative(field=field, multi=alpha).values
        total += np.nan_to_num(part, nan=0.0)
    return DiscreteField(grid=grid, values=np.where(grid.interior, total, 0))


def _evaluation_nodes(
    domain: Domain, grid: GridSpec, lam: int, seed: int
) -> List[np.ndarray]:
    rng = np.random.Generator(np.random.Philox(seed + 1))
    nodes = []
    while len(nodes) < EVALUATION_POINTS:
        point = domain.sample_interior_point(rng=rng)
        node = grid.snap(point=point)
        if grid.distance[node] >= (lam + 1) * grid.h:
            nodes.append(grid.node_point(index=node))
    return nodes


def _ratios(
    params: DimensionParams,
    domain: Domain,
    op: DiscreteOperator,
    fields: List[DataEntry],
    nodes: List[np.ndarray],
) -> Tuple[float, float, float]:
    """Returns the sup over nodes of |nabla^lambda u| / rhs, the same sup
    against the epsilon form of rhs (0 for odd n) and the ratio of the
    L^inf norm of nabla^lambda u to the weighted L^p norm."""
    grid = op.grid
    u = solve_dirichlet(op=op, rhs=divergence_rhs(fields=fields))
    norm = derivative_norm(
        field=u, i=params.lam, multi=MultiIndex.zero(params.n)
    ).values
    pointwise = 0.0
    pointwise_eps = 0.0
    for x in nodes:
        bound = dirichlet_rhs(params=params, x=x, data=fields, domain=domain)
        value = float(norm[grid.snap(point=x)])
        if bound > 0:
            pointwise = max(pointwise, value / bound)
        if params.is_odd:
            continue
        bound = dirichlet_rhs(
            params=params,
            x=x,
            data=fields,
            domain=domain,
            epsilon=EVEN_EPSILON,
        )
        if bound > 0:
            pointwise_eps = max(pointwise_eps, value / bound)
    sup = float(np.nanmax(np.where(grid.interior, norm, np.nan)))
    lp = data_lp_norm(
        params=params, data=fields, p=LP_EXPONENT, epsilon=EVEN_EPSILON
    )
    return pointwise, pointwise_eps, (sup / lp if lp > 0 else 0.0)


@typechecked
def verify_dirichlet_bound(
    *,
    domain: Domain,
    params: DimensionParams,
    data: List[DataFunction],
    grid_levels: List[float],
    seed: int = 0,
) -> CheckReport:
    """Measures the pointwise and L^p Dirichlet bounds across levels and
    the invariance of the pointwise ratio under scaling of the data.

    :param data: Pairs (alpha, f_alpha) with f_alpha a function of rows of
    points.
    """
    if not data:
        raise EmptyInputError("Error, the Dirichlet check needs data.")
    for alpha, _ in data:
        if alpha.order > params.lam:
            raise SpecMismatchError(
                f"Error, |alpha|={alpha.order} exceeds lambda={params.lam}"
            )
    report = CheckReport(name="dirichlet_bound")
    pointwise: List[float] = []
    lp: List[float] = []
    pointwise_eps: List[float] = []
    scaled = 0.0
    for h in grid_levels:
        level = build_level(domain=domain, m=params.m, h=h)
        nodes = _evaluation_nodes(domain, level.grid, params.lam, seed)
        fields = _data_fields(level.grid, data, 1.0)
        ratio, eps_ratio, lp_ratio = _ratios(
            params, domain, level.op, fields, nodes
        )
        pointwise.append(ratio)
        pointwise_eps.append(eps_ratio)
        lp.append(lp_ratio)
        report.measurements[f"pointwise_h{h:g}"] = ratio
        report.measurements[f"lp_h{h:g}"] = lp_ratio
        if not params.is_odd:
            report.measurements[f"pointwise_epsilon_h{h:g}"] = eps_ratio
        logger.info(
            "Dirichlet bound at h=%g: pointwise %.6g, L^p %.6g.",
            h,
            ratio,
            lp_ratio,
        )
        if h == grid_levels[-1]:
            fields = _data_fields(level.grid, data, SCALING)
            scaled, _, _ = _ratios(params, domain, level.op, fields, nodes)
    report.measurements["scaled_pointwise"] = scaled
    finest = pointwise[-1]
    change = abs(scaled - finest) / finest if finest else abs(scaled)
    report.measurements["scaling_change"] = change
    report.verdicts["pointwise_stable"] = refinement_stable(sups=pointwise)
    report.verdicts["lp_stable"] = refinement_stable(sups=lp)
    if not params.is_odd:
        report.verdicts["pointwise_epsilon_stable"] = refinement_stable(
            sups=pointwise_eps
        )
    report.verdicts["linearity"] = change <= LINEARITY_RTOL
    return report
