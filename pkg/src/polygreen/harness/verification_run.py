"""Description of one estimate verification run and the per-level solver
state it needs."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from typeguard import typechecked

from polygreen.estimates.bound_spec import BoundSpec, validate_spec
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.geometry.sampling import RegionClassifier
from polygreen.oracle.ball_oracle import BallOracle
from polygreen.solver.grid import DEFAULT_NODE_CAP, GridSpec, build_grid
from polygreen.solver.operator import (
    BOUNDARY_TREATMENTS,
    DiscreteOperator,
    assemble_operator,
)

logger = logging.getLogger(__name__)

LHS_SOURCES = ("solver", "oracle")


@dataclass(frozen=True)
class SamplePlan:
    """Number of pairs, seed and smallest separation of a run."""

    count: int
    seed: int
    min_sep: float = 0.0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"Error, count must be positive:{self.count}")
        if self.min_sep < 0:
            raise ValueError(f"Error, min_sep must be >= 0:{self.min_sep}")


@dataclass
class VerificationRun:
    """Domain, (m, n), grid levels, sample plan and estimates to check.

    :param exclusion: Pairs keep at least exclusion * h of the coarsest
    level between the points and from the boundary.
    :param lhs_source: "solver" differences discrete Green columns,
    "oracle" the closed-form ball Green function.
    :param boundary: Boundary treatment of the solver, see
    DiscreteOperator.
    """

    domain: Domain
    params: DimensionParams
    grid_levels: List[float]
    plan: SamplePlan
    specs: List[BoundSpec]
    classifier: RegionClassifier = field(default_factory=RegionClassifier)
    exclusion: float = 8.0
    lhs_source: str = "solver"
    node_cap: int = DEFAULT_NODE_CAP
    boundary: str = "zero-extension"

    def __post_init__(self) -> None:
        if len(self.grid_levels) < 2:
            raise ValueError(
                "Error, a run needs at least 2 grid levels to judge "
                + f"stability, got:{self.grid_levels}"
            )
        if sorted(self.grid_levels, reverse=True) != self.grid_levels:
            raise ValueError(
                f"Error, grid levels must go coarse to fine:{self.grid_levels}"
            )
        if self.domain.n != self.params.n:
            raise ValueError(
                f"Error, {self.domain} does not live in n={self.params.n}"
            )
        for spec in self.specs:
            validate_spec(spec=spec, params=self.params)
        if self.lhs_source not in LHS_SOURCES:
            raise ValueError(
                f"Error, unknown lhs_source:{self.lhs_source}, expected one "
                + f"of {LHS_SOURCES}"
            )
        if self.boundary not in BOUNDARY_TREATMENTS:
            raise ValueError(
                f"Error, unknown boundary:{self.boundary}, expected one of "
                + f"{BOUNDARY_TREATMENTS}"
            )
        if self.boundary == "cut-cell" and self.params.m != 1:
            raise ValueError(
                "Error, the cut-cell treatment needs m=1, got "
                + f"m={self.params.m}"
            )
        if self.lhs_source == "oracle" and ball_oracle(
            domain=self.domain, m=self.params.m
        ) is None:
            raise ValueError(
                f"Error, no closed-form Green function for {self.domain}"
            )

    @property
    def coarsest(self) -> float:
        """Mesh width of the coarsest level."""
        return self.grid_levels[0]

    @property
    def min_distance(self) -> float:
        """Smallest separation and boundary distance of recorded pairs."""
        return self.exclusion * self.coarsest


@typechecked
def ball_oracle(*, domain: Domain, m: int) -> Optional[BallOracle]:
    """Returns the closed-form Green function of a ball domain, if any."""
    if domain.kind == DomainKind.UNIT_BALL:
        return BallOracle(m=m, n=domain.n)
    return None


@dataclass
class Level:
    """Grid and factorised operator of one mesh width."""

    h: float
    grid: GridSpec
    op: Optional[DiscreteOperator]


@typechecked
def build_level(
    *,
    domain: Domain,
    m: int,
    h: float,
    with_operator: bool = True,
    node_cap: int = DEFAULT_NODE_CAP,
    boundary: str = "zero-extension",
) -> Level:
    """Builds the grid of one level and, unless skipped, its operator."""
    grid = build_grid(domain=domain, h=h, depth=m, node_cap=node_cap)
    op = None
    if with_operator:
        op = assemble_operator(
            domain=domain, m=m, grid=grid, boundary=boundary
        )
    logger.info(
        "Level h=%g ready with %d interior nodes.", h, grid.interior_count
    )
    return Level(h=h, grid=grid, op=op)
