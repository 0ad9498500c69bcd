"""Per-pair estimate records, sup ratio statistics across grid levels and
pass/fail reports of the individual checks."""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from typeguard import typechecked

from polygreen.exceptions import EmptyInputError
from polygreen.geometry.sampling import Region, SamplePair

STABILITY_FACTOR = 2.0


@dataclass(frozen=True)
class EstimateRecord:
    """One sampled pair with the two sides of an estimate, C = 1."""

    pair: SamplePair
    region: Region
    lhs: float
    rhs: float

    def __post_init__(self) -> None:
        if not self.rhs > 0:
            raise ValueError(
                "Error, estimate right-hand side must be positive, "
                + f"got:{self.rhs}"
            )

    @property
    def ratio(self) -> float:
        """lhs / rhs."""
        return self.lhs / self.rhs


@dataclass
class LevelRecords:
    """Records of one estimate on one grid level."""

    h: float
    records: List[EstimateRecord] = field(default_factory=list)

    def sup_ratio(self, region: Optional[Region] = None) -> float:
        """Returns the largest ratio, over one region when given; 0 for no
        records."""
        ratios = [
            r.ratio
            for r in self.records
            if region is None or r.region == region
        ]
        return max(ratios, default=0.0)

    def region_sups(self) -> Dict[str, float]:
        """Returns the sup ratio of every populated region."""
        populated = sorted({r.region for r in self.records})
        return {region.value: self.sup_ratio(region) for region in populated}


@dataclass
class EstimateReport:
    """Sup ratios of one estimate over grid levels, coarse to fine.

    The estimated constant is the overall sup ratio; the estimate is
    refinement-stable when consecutive level sups differ by at most a
    factor 2.
    """

    label: str
    levels: List[LevelRecords]
    sup_by_level: List[float]
    region_sups: List[Dict[str, float]]
    sup_ratio: float
    stable: bool
    notes: Dict[str, float] = field(default_factory=dict)

    @property
    def grid_levels(self) -> List[float]:
        """Mesh widths of the levels."""
        return [level.h for level in self.levels]

    @property
    def finite(self) -> bool:
        """True if every level sup is finite."""
        return all(math.isfinite(s) for s in self.sup_by_level)

    @property
    def passed(self) -> bool:
        """True if the sup ratios are finite and refinement-stable."""
        return self.finite and self.stable


@typechecked
def refinement_stable(
    *, sups: List[float], factor: float = STABILITY_FACTOR
) -> bool:
    """Returns True if consecutive sups stay within the factor.

    Two zero sups count as stable; a single level is never stable.
    """
    if len(sups) < 2:
        return False
    for coarse, fine in zip(sups, sups[1:]):
        if not (math.isfinite(coarse) and math.isfinite(fine)):
            return False
        if coarse == 0 and fine == 0:
            continue
        if coarse == 0 or fine == 0:
            return False
        if max(coarse / fine, fine / coarse) > factor:
            return False
    return True


@typechecked
def ratio_statistics(
    *, label: str, levels: List[LevelRecords]
) -> EstimateReport:
    """Reduces per-level records to sup ratios and the stability flag."""
    if not levels or not any(level.records for level in levels):
        raise EmptyInputError(f"Error, no records for {label}.")
    sups = [level.sup_ratio() for level in levels]
    return EstimateReport(
        label=label,
        levels=levels,
        sup_by_level=sups,
        region_sups=[level.region_sups() for level in levels],
        sup_ratio=max(sups),
        stable=refinement_stable(sups=sups),
    )


@dataclass
class CheckReport:
    """Outcome of a check that is not a per-pair estimate.

    verdicts gate the outcome; measurements and notes are informational.
    """

    name: str
    verdicts: Dict[str, bool] = field(default_factory=dict)
    measurements: Dict[str, float] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True if every verdict holds."""
        return all(self.verdicts.values())
