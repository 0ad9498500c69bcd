"""Symmetry G_h(x, y) = G_h(y, x) and the sign of the discrete Green
function on sampled node pairs."""
import logging
from typing import List, Tuple

import numpy as np
from typeguard import typechecked

from polygreen.estimates.report import CheckReport
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.domain import Domain
from polygreen.harness.verification_run import build_level
from polygreen.solver.grid import GridSpec
from polygreen.solver.green import GreenColumns

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-9
SAMPLE_NODES = 24
AXIS_NODES = 12


def _sample_nodes(
    domain: Domain, grid: GridSpec, count: int, seed: int
) -> List[Tuple[int, ...]]:
    rng = np.random.Generator(np.random.Philox(seed))
    nodes = set()
    attempts = 0
    while len(nodes) < count and attempts < 100 * count:
        attempts += 1
        node = grid.snap(point=domain.sample_interior_point(rng=rng))
        if grid.distance[node] > 0:
            nodes.add(node)
    low, high = domain.bounding_box()
    center = 0.5 * (low + high)
    for t in np.linspace(0.05, 0.95, AXIS_NODES):
        point = center.copy()
        point[0] = low[0] + t * (high[0] - low[0])
        node = grid.snap(point=point)
        if grid.distance[node] > 0:
            nodes.add(node)
    return sorted(nodes)


@typechecked
def verify_symmetry_and_sign(
    *,
    domain: Domain,
    params: DimensionParams,
    h: float,
    count: int = SAMPLE_NODES,
    seed: int = 0,
) -> CheckReport:
    """Checks the symmetry of G_h on all pairs of sampled nodes and records
    the smallest sampled value.

    For m = 1 positivity is a verdict; for m >= 2 the sign of the minimum
    is informational.
    """
    level = build_level(domain=domain, m=params.m, h=h)
    grid = level.grid
    nodes = _sample_nodes(domain, grid, count, seed)
    columns = GreenColumns(op=level.op)
    columns.prefetch(nodes=nodes)
    values = np.array(
        [[columns.column(node=b).values[a] for b in nodes] for a in nodes]
    )
    scale = float(np.max(np.abs(values)))
    asymmetry = float(np.max(np.abs(values - values.T))) / scale
    minimum = float(np.min(values))
    report = CheckReport(name=f"symmetry_m{params.m}_n{params.n}")
    report.measurements["asymmetry"] = asymmetry
    report.measurements["min_green"] = minimum
    report.measurements["max_green"] = scale
    report.verdicts["symmetry"] = asymmetry <= SYMMETRY_RTOL
    if params.m == 1:
        report.verdicts["positive"] = minimum > 0
    else:
        report.notes["sign"] = (
            "changes sign" if minimum < 0 else "no negative value sampled"
        )
    logger.info(
        "Green symmetry on %d nodes of %s: asymmetry %.3g, min %.6g.",
        len(nodes),
        domain,
        asymmetry,
        minimum,
    )
    return report
