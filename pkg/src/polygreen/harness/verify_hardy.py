"""Hardy's inequality ||v/|x-Q|^m|| <= C ||nabla^m v|| for boundary points
Q, measured on random compactly supported fields."""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from typeguard import typechecked

from polygreen.estimates.report import CheckReport, refinement_stable
from polygreen.exceptions import ZeroFieldError
from polygreen.geometry.domain import Domain
from polygreen.harness.verify_decay import BumpSource
from polygreen.solver.differences import hardy_ratio
from polygreen.solver.grid import build_grid, sample_function

logger = logging.getLogger(__name__)

RADIUS_RANGE = (0.25, 0.9)


@dataclass(frozen=True)
class HardyTrial:
    """A bump times a random affine factor, with its boundary point."""

    bump: BumpSource
    slope: np.ndarray
    offset: float
    q: np.ndarray

    @typechecked
    def values(self, points: np.ndarray) -> np.ndarray:
        """Returns the trial field at rows of points."""
        affine = self.offset + (points - self.bump.center) @ self.slope
        return affine * self.bump.values(points)


@typechecked
def hardy_trials(
    *, domain: Domain, trials: int, seed: int
) -> List[HardyTrial]:
    """Draws trial fields supported inside the domain, each paired with a
    boundary point."""
    if trials < 1:
        raise ValueError(f"Error, trials must be positive:{trials}")
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for _ in range(trials):
        center = domain.sample_interior_point(rng=rng)
        fraction = rng.uniform(*RADIUS_RANGE)
        rho = fraction * domain.distance_to_boundary(x=center)
        out.append(
            HardyTrial(
                bump=BumpSource(center=center, rho=float(rho)),
                slope=rng.normal(size=domain.n) / rho,
                offset=float(rng.uniform(0.5, 1.5)),
                q=domain.sample_boundary_point(rng=rng),
            )
        )
    return out


@typechecked
def verify_hardy(
    *,
    domain: Domain,
    m: int,
    trials: int,
    seed: int,
    grid_levels: List[float],
) -> CheckReport:
    """Returns the largest Hardy ratio per level; passes if it is
    refinement stable."""
    samples = hardy_trials(domain=domain, trials=trials, seed=seed)
    report = CheckReport(name=f"hardy_m{m}")
    sups: List[float] = []
    for h in grid_levels:
        grid = build_grid(domain=domain, h=h, depth=m)
        best = 0.0
        skipped = 0
        for trial in samples:
            field = sample_function(grid=grid, func=trial.values)
            try:
                ratio = hardy_ratio(field=field, m=m, q=trial.q)
            except ZeroFieldError:
                skipped += 1
                continue
            best = max(best, ratio)
        if skipped:
            logger.warning(
                "Skipped %d trial fields that vanish on the grid h=%g.",
                skipped,
                h,
            )
        sups.append(best)
        report.measurements[f"max_ratio_h{h:g}"] = best
        logger.info("Hardy ratio at h=%g: max %.6g.", h, best)
    report.verdicts["refinement_stable"] = refinement_stable(sups=sups)
    return report
