import math

import numpy as np
import pytest

from polygreen.estimates.report import (
    CheckReport,
    EstimateRecord,
    LevelRecords,
    ratio_statistics,
    refinement_stable,
)
from polygreen.exceptions import EmptyInputError
from polygreen.geometry.sampling import Region, SamplePair

PAIR = SamplePair(x=np.zeros(2), y=np.ones(2), d_x=0.5, d_y=0.5, sep=0.3)


def _record(ratio: float, region: Region = Region.CASE_III):
    return EstimateRecord(pair=PAIR, region=region, lhs=ratio, rhs=1.0)


@pytest.mark.parametrize(
    "sups,stable",
    [
        ([2.0, 2.5], True),
        ([1.0, 2.0, 4.0], True),
        ([1.0, 3.0], False),
        ([0.0, 0.0], True),
        ([0.0, 1.0], False),
        ([1.0, math.inf], False),
        ([1.0], False),
    ],
)
def test_refinement_stable(sups, stable):
    assert refinement_stable(sups=sups) is stable


def test_ratio_statistics():
    coarse = LevelRecords(
        h=0.125,
        records=[_record(1.0, Region.CASE_I), _record(2.0, Region.CASE_II)],
    )
    fine = LevelRecords(
        h=0.0625, records=[_record(3.0), _record(0.5, Region.CASE_I)]
    )
    report = ratio_statistics(
        label="green-odd-low_i0_j0", levels=[coarse, fine]
    )
    assert report.sup_by_level == [2.0, 3.0]
    assert report.sup_ratio == 3.0
    assert report.stable
    assert report.passed
    assert report.grid_levels == [0.125, 0.0625]
    assert report.region_sups[0] == {"CaseI": 1.0, "CaseII": 2.0}


def test_ratio_statistics_needs_records():
    with pytest.raises(EmptyInputError):
        ratio_statistics(label="x", levels=[LevelRecords(h=0.1)])
    with pytest.raises(EmptyInputError):
        ratio_statistics(label="x", levels=[])


def test_record_needs_a_positive_bound():
    with pytest.raises(ValueError):
        EstimateRecord(pair=PAIR, region=Region.CASE_I, lhs=1.0, rhs=0.0)


def test_check_report_passes_on_all_verdicts():
    report = CheckReport(name="hardy_m2")
    assert report.passed
    report.verdicts["refinement_stable"] = True
    report.verdicts["other"] = False
    assert not report.passed
