"""The sharpness example u = eta d_1^(lambda-1) Gamma in the punctured ball
for odd n.

Near the puncture u is the exact singular solution, so (-Delta)^m u is
supported in the cut-off band 1/4 <= |x| <= 1/2. Its derivatives of order
lambda are bounded without a limit at the origin, those of order lambda+1
blow up like |x|^-1. All of this is measured on the symbolic expression;
only the energy norm uses grids.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

import numpy as np
import sympy as sp
from typeguard import typechecked

from polygreen.estimates.cutoff import CutoffCalculus, CutoffFunction
from polygreen.estimates.report import CheckReport, refinement_stable
from polygreen.exceptions import DimensionOutOfRangeError, InvalidParityError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
    multi_indices,
    multinomial_weight,
)
from polygreen.fundamental.fundamental_solution import cmn_constant
from polygreen.fundamental.symbolic import derivative_expression
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.geometry.sampling import sphere_points
from polygreen.solver.differences import energy_norm
from polygreen.solver.grid import build_grid, sample_function

logger = logging.getLogger(__name__)

SHELLS = tuple(range(2, 13))
DIRECTIONS = 200
BOUNDED_VARIATION = 0.10
GROWTH_RANGE = (-1.2, -0.8)
MIN_GAP = 0.1
SUPPORT_RTOL = 1e-8
ZONE_SAMPLES = 400


@typechecked
def counterexample_params(*, m: int, n: int) -> DimensionParams:
    """Returns (m, n) after checking that the example exists."""
    if n % 2 == 0:
        raise InvalidParityError(
            f"Error, the counterexample needs odd n, got n={n}"
        )
    params = DimensionParams(m=m, n=n)
    if params.lam < 1:
        raise DimensionOutOfRangeError(
            f"Error, the counterexample needs lambda >= 1, got m={m}, n={n}"
        )
    return params


@lru_cache(maxsize=None)
def counterexample_expression(m: int, n: int) -> sp.Expr:
    """Returns u = h0 C d_1^(lambda-1) |z|^(2m-n) with h0 the cut-off."""
    params = counterexample_params(m=m, n=n)
    orders = (params.lam - 1,) + (0,) * (n - 1)
    calculus = CutoffCalculus(n=n, order=2 * m)
    kernel = cmn_constant(m=m, n=n) * derivative_expression(m, n, orders)
    return calculus.h[0] * kernel


@lru_cache(maxsize=None)
def _derivative_function(
    m: int, n: int, components: Tuple[int, ...]
) -> Callable[..., np.ndarray]:
    calculus = CutoffCalculus(n=n, order=2 * m)
    expr = calculus.derivative(
        counterexample_expression(m, n), MultiIndex(components=components)
    )
    return calculus.lambdify(expr)


@lru_cache(maxsize=None)
def _source_function(m: int, n: int) -> Callable[..., np.ndarray]:
    calculus = CutoffCalculus(n=n, order=2 * m)
    expr = counterexample_expression(m, n)
    for _ in range(m):
        expr = calculus.laplacian(expr)
    return calculus.lambdify(((-1) ** m) * expr)


def _evaluate(
    params: DimensionParams,
    func: Callable[..., np.ndarray],
    cutoff: CutoffFunction,
    points: np.ndarray,
) -> np.ndarray:
    calculus = CutoffCalculus(n=params.n, order=2 * params.m)
    return calculus.evaluate(
        funcs=[func], cutoff=cutoff, points=points, scale=1.0, diam=1.0
    )[0]


@typechecked
def gradient_tensor(
    *,
    params: DimensionParams,
    order: int,
    points: np.ndarray,
    cutoff: CutoffFunction,
) -> np.ndarray:
    """Returns the weighted components sqrt(order!/beta!) d^beta u, one
    column per |beta| = order, so that row norms give |nabla^order u|."""
    columns = []
    for beta in multi_indices(n=params.n, order=order):
        func = _derivative_function(params.m, params.n, beta.components)
        values = _evaluate(params, func, cutoff, points)
        columns.append(math.sqrt(multinomial_weight(multi=beta)) * values)
    return np.stack(columns, axis=1)


def _shell_sups(
    params: DimensionParams, order: int, cutoff: CutoffFunction
) -> List[float]:
    directions = sphere_points(n=params.n, count=DIRECTIONS)
    sups = []
    for k in SHELLS:
        tensor = gradient_tensor(
            params=params,
            order=order,
            points=2.0 ** (-k) * directions,
            cutoff=cutoff,
        )
        sups.append(float(np.max(np.linalg.norm(tensor, axis=1))))
    return sups


def _zone_points(n: int, low: float, high: float) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(n))
    radii = rng.uniform(low, high, ZONE_SAMPLES)
    return radii[:, None] * sphere_points(n=n, count=ZONE_SAMPLES)


@typechecked
def source_support(
    *, params: DimensionParams, cutoff: CutoffFunction
) -> Dict[str, float]:
    """Returns the largest |(-Delta)^m u| inside |x| < 1/4, inside the band
    and between the band and the unit sphere."""
    func = _source_function(params.m, params.n)
    zones = {
        "inner": (1e-2, 0.25 - 1e-9),
        "band": (0.25, 0.5),
        "outer": (0.5 + 1e-9, 1.0),
    }
    return {
        name: float(
            np.max(
                np.abs(
                    _evaluate(
                        params, func, cutoff, _zone_points(params.n, lo, hi)
                    )
                )
            )
        )
        for name, (lo, hi) in zones.items()
    }


@typechecked
def energy_norms(
    *, params: DimensionParams, levels: List[float]
) -> List[float]:
    """Returns the discrete energy norm of u on the punctured ball."""
    domain = Domain(kind=DomainKind.PUNCTURED_BALL, n=params.n, shape=(0.0,))
    cutoff = CutoffFunction(max_order=2 * params.m)
    func = _derivative_function(
        params.m, params.n, MultiIndex.zero(params.n).components
    )
    norms = []
    for h in levels:
        grid = build_grid(domain=domain, h=h, depth=params.m)

        def sample(points: np.ndarray) -> np.ndarray:
            values = _evaluate(params, func, cutoff, points)
            # u is homogeneous of degree lambda >= 1 at the puncture.
            return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)

        field = sample_function(grid=grid, func=sample)
        norms.append(energy_norm(field=field, m=params.m))
        logger.info("Energy norm of u at h=%g: %.6g.", h, norms[-1])
    return norms


@typechecked
def verify_counterexample(
    *, m: int, n: int, grid_levels: List[float]
) -> CheckReport:
    """Checks boundedness of nabla^lambda u, blow-up of nabla^(lambda+1) u,
    the missing limit at the puncture, the support of (-Delta)^m u and the
    stability of the energy norm."""
    params = counterexample_params(m=m, n=n)
    lam = params.lam
    cutoff = CutoffFunction(max_order=2 * m)
    report = CheckReport(name=f"counterexample_m{m}_n{n}")

    bounded = _shell_sups(params, lam, cutoff)
    variation = (max(bounded) - min(bounded)) / max(bounded)
    report.measurements["bounded_variation"] = variation
    report.verdicts["bounded"] = variation <= BOUNDED_VARIATION

    growing = _shell_sups(params, lam + 1, cutoff)
    radii = np.array([2.0 ** (-k) for k in SHELLS])
    slope = float(np.polyfit(np.log(radii), np.log(growing), 1)[0])
    report.measurements["growth_exponent"] = slope
    report.verdicts["unbounded"] = (
        GROWTH_RANGE[0] <= slope <= GROWTH_RANGE[1]
    )

    axis = np.eye(n)[0]
    radius = 2.0 ** (-SHELLS[-1])
    rays = gradient_tensor(
        params=params,
        order=lam,
        points=np.stack([radius * axis, -radius * axis]),
        cutoff=cutoff,
    )
    gap = float(np.linalg.norm(rays[0] - rays[1])) / max(bounded)
    report.measurements["ray_gap"] = gap
    report.verdicts["no_limit"] = gap >= MIN_GAP

    support = source_support(params=params, cutoff=cutoff)
    report.measurements.update(
        {f"source_sup_{name}": value for name, value in support.items()}
    )
    tolerance = SUPPORT_RTOL * support["band"]
    report.verdicts["source_support"] = (
        support["band"] > 0
        and support["inner"] <= tolerance
        and support["outer"] <= tolerance
    )

    norms = energy_norms(params=params, levels=grid_levels)
    for h, norm in zip(grid_levels, norms):
        report.measurements[f"energy_h{h:g}"] = norm
    report.verdicts["energy_stable"] = refinement_stable(sups=norms)
    logger.info("Counterexample m=%d, n=%d: %s.", m, n, report.verdicts)
    return report
