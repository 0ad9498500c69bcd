"""Samples interior point pairs and sorts them into the three regions of
the pointwise estimates: far apart (CaseI), close together (CaseII) and
comparable (CaseIII)."""
import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List

import numpy as np
from typeguard import typechecked

from polygreen.exceptions import RegionUnreachableWarning
from polygreen.geometry.domain import Domain

logger = logging.getLogger(__name__)

COMPARABILITY_RTOL = 1e-12


class Region(str, Enum):
    """Region of a point pair relative to the boundary distances."""

    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"


@dataclass(frozen=True)
class SamplePair:
    """Two interior points with their boundary distances and separation."""

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    d_x: float
    d_y: float
    sep: float

    def __post_init__(self) -> None:
        if self.sep < 0 or self.d_x <= 0 or self.d_y <= 0:
            raise ValueError(
                f"Error, invalid pair: d_x={self.d_x}, d_y={self.d_y}, "
                + f"sep={self.sep}"
            )
        slack = COMPARABILITY_RTOL * max(self.d_x, self.d_y, self.sep)
        if (
            self.d_x > self.sep + self.d_y + slack
            or self.d_y > self.sep + self.d_x + slack
        ):
            raise ValueError(
                "Error, boundary distances violate the triangle inequality:"
                + f"d_x={self.d_x}, d_y={self.d_y}, sep={self.sep}"
            )

    def swapped(self) -> "SamplePair":
        """Returns the pair with x and y exchanged."""
        return SamplePair(
            x=self.y, y=self.x, d_x=self.d_y, d_y=self.d_x, sep=self.sep
        )


@typechecked
def make_pair(*, domain: Domain, x: np.ndarray, y: np.ndarray) -> SamplePair:
    """Builds a SamplePair from two interior points of a domain."""
    return SamplePair(
        x=np.asarray(x, dtype=float),
        y=np.asarray(y, dtype=float),
        d_x=domain.distance_to_boundary(x=x),
        d_y=domain.distance_to_boundary(x=y),
        sep=float(np.linalg.norm(np.asarray(x) - np.asarray(y))),
    )


@dataclass(frozen=True)
class RegionClassifier:
    """Threshold N separating the three regions, N >= 25."""

    N: float = 25.0

    def __post_init__(self) -> None:
        if self.N < 25:
            raise ValueError(
                f"Error, region threshold N must be at least 25, got:{self.N}"
            )


@typechecked
def classify_region(*, pair: SamplePair, cls: RegionClassifier) -> Region:
    """Returns CaseI if sep >= N min(d_x, d_y), CaseII if
    sep <= max(d_x, d_y)/N and CaseIII otherwise."""
    if pair.sep >= cls.N * min(pair.d_x, pair.d_y):
        return Region.CASE_I
    if pair.sep <= max(pair.d_x, pair.d_y) / cls.N:
        return Region.CASE_II
    return Region.CASE_III


@typechecked
def assert_comparability(*, pair: SamplePair, cls: RegionClassifier) -> None:
    """Asserts that close pairs have comparable boundary distances.

    If sep <= d_y/N then (N-1) d_y <= N d_x <= (N+1) d_y, and the same
    with x and y exchanged.
    """
    big_n = cls.N
    for near, other in ((pair.d_y, pair.d_x), (pair.d_x, pair.d_y)):
        if pair.sep <= near / big_n:
            slack = COMPARABILITY_RTOL * big_n * max(near, other)
            if not (
                (big_n - 1) * near - slack
                <= big_n * other
                <= (big_n + 1) * near + slack
            ):
                raise ValueError(
                    "Error, close pair has incomparable boundary distances:"
                    + f"{near}, {other}, sep={pair.sep}"
                )


@typechecked
def _propose_pair(
    *, domain: Domain, rng: np.random.Generator
) -> List[np.ndarray]:
    """Proposes (x, y) with y uniform, nearby or moderately far from x."""
    x = domain.sample_interior_point(rng=rng)
    mode = int(rng.integers(0, 3))
    if mode == 0:
        return [x, domain.sample_interior_point(rng=rng)]
    direction = rng.standard_normal(domain.n)
    direction /= np.linalg.norm(direction)
    exponent = rng.uniform(-2.5, 0.0) if mode == 1 else rng.uniform(0.0, 2.0)
    d_x = domain.distance_to_boundary(x=x)
    return [x, x + direction * d_x * 10.0**exponent]


@typechecked
def sample_interior_pairs(
    *,
    domain: Domain,
    count: int,
    seed: int,
    min_sep: float,
    cls: RegionClassifier = RegionClassifier(),
    max_attempts: int = 0,
) -> List[SamplePair]:
    """Returns count reproducible pairs, stratified over the regions.

    Each region receives ceil(count/10) pairs when it can be reached within
    the attempt budget, otherwise a RegionUnreachableWarning is emitted and
    the remaining slots go to the reachable regions.

    :param min_sep: Lower bound on the separation of every pair.
    :param max_attempts: Proposal budget, 0 selects 2000 + 200*count.
    """
    if count < 1:
        raise ValueError(f"Error, count must be positive, got:{count}")
    if min_sep < 0:
        raise ValueError(f"Error, min_sep must be >= 0, got:{min_sep}")
    rng = np.random.Generator(np.random.Philox(seed))
    budget = max_attempts if max_attempts > 0 else 2000 + 200 * count
    quota = min(count, math.ceil(count / 10))
    spare = max(0, count - len(Region) * quota)

    buckets: Dict[Region, int] = {region: 0 for region in Region}
    accepted: List[SamplePair] = []
    overflow: List[SamplePair] = []
    attempts = 0
    while attempts < budget and len(accepted) < count:
        if all(buckets[r] >= quota for r in Region) and spare == 0:
            break
        attempts += 1
        x, y = _propose_pair(domain=domain, rng=rng)
        if not domain.contains(x=y):
            continue
        pair = make_pair(domain=domain, x=x, y=y)
        if pair.sep < min_sep or pair.sep == 0:
            continue
        assert_comparability(pair=pair, cls=cls)
        region = classify_region(pair=pair, cls=cls)
        if buckets[region] < quota:
            buckets[region] += 1
            accepted.append(pair)
        elif spare > 0:
            spare -= 1
            accepted.append(pair)
        elif len(overflow) < count:
            overflow.append(pair)

    for region in Region:
        if buckets[region] < quota and attempts >= budget:
            message = (
                f"Region {region.value} received {buckets[region]} of "
                + f"{quota} pairs in {domain} with min_sep={min_sep}."
            )
            logger.warning(message)
            warnings.warn(message, RegionUnreachableWarning)

    # Slots of unreachable regions go to pairs that exceeded their quota.
    accepted.extend(overflow[: count - len(accepted)])
    logger.debug(
        "Sampled %d pairs in %d attempts, per region: %s",
        len(accepted),
        attempts,
        {r.value: c for r, c in buckets.items()},
    )
    return accepted


@typechecked
def region_counts(
    *, pairs: List[SamplePair], cls: RegionClassifier
) -> Dict[Region, int]:
    """Returns the number of pairs per region."""
    counts = {region: 0 for region in Region}
    for pair in pairs:
        counts[classify_region(pair=pair, cls=cls)] += 1
    return counts


@typechecked
def sphere_points(*, n: int, count: int, seed: int = 0) -> np.ndarray:
    """Returns count nearly uniform unit vectors of R^n.

    Equally spaced angles for n = 2, a Fibonacci lattice for n = 3 and
    normalised Gaussian samples otherwise.
    """
    if count < 1:
        raise ValueError(f"Error, count must be positive, got:{count}")
    k = np.arange(count) + 0.5
    if n == 2:
        angle = 2 * math.pi * k / count
        return np.stack([np.cos(angle), np.sin(angle)], axis=1)
    if n == 3:
        polar = np.arccos(1 - 2 * k / count)
        azimuth = math.pi * (1 + math.sqrt(5)) * k
        return np.stack(
            [
                np.cos(azimuth) * np.sin(polar),
                np.sin(azimuth) * np.sin(polar),
                np.cos(polar),
            ],
            axis=1,
        )
    rng = np.random.Generator(np.random.Philox(seed))
    points = rng.standard_normal((count, n))
    return points / np.linalg.norm(points, axis=1, keepdims=True)
