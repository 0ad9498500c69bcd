import math

import numpy as np
import pytest

from polygreen.estimates.bound_spec import (
    BoundSpec,
    BoundTarget,
    admissible_specs,
)
from polygreen.exceptions import RegionUnreachableWarning, SpecMismatchError
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.geometry.sampling import Region
from polygreen.harness.verification_run import (
    SamplePlan,
    VerificationRun,
    ball_oracle,
    build_level,
)
from polygreen.harness.verify_green import (
    sample_run_pairs,
    snap_pair,
    verify_green_estimates,
    verify_regular_part,
)

GREEN_3D = BoundSpec(target=BoundTarget.GREEN_ODD_HIGH, i=0, j=0)
REGULAR_3D = BoundSpec(target=BoundTarget.REGULAR_ODD_HIGH, i=0, j=0)


def _run(
    domain,
    m,
    n,
    specs,
    levels,
    source="solver",
    exclusion=1.0,
    boundary="zero-extension",
):
    return VerificationRun(
        domain=domain,
        params=DimensionParams(m=m, n=n),
        grid_levels=levels,
        plan=SamplePlan(count=10, seed=3),
        specs=specs,
        exclusion=exclusion,
        lhs_source=source,
        boundary=boundary,
    )


def _ratio_change(first, second):
    a, b = first.sup_by_level[-1], second.sup_by_level[-1]
    return abs(a - b) / max(abs(a), abs(b))


def test_sample_plan_rejects_bad_values():
    with pytest.raises(ValueError):
        SamplePlan(count=0, seed=0)
    with pytest.raises(ValueError):
        SamplePlan(count=5, seed=0, min_sep=-1.0)


def test_run_needs_two_levels(unit_ball_3d):
    with pytest.raises(ValueError, match="at least 2 grid levels"):
        _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25])


def test_run_levels_go_coarse_to_fine(unit_ball_3d):
    with pytest.raises(ValueError, match="coarse to fine"):
        _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.125, 0.25])


def test_run_dimension_must_match_domain(unit_disk):
    with pytest.raises(ValueError):
        _run(unit_disk, 1, 3, [GREEN_3D], [0.25, 0.125])


def test_run_validates_specs(unit_ball_3d):
    wrong = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    with pytest.raises(SpecMismatchError):
        _run(unit_ball_3d, 1, 3, [wrong], [0.25, 0.125])


def test_run_rejects_unknown_source(unit_ball_3d):
    with pytest.raises(ValueError, match="lhs_source"):
        _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25, 0.125], source="table")


def test_oracle_needs_a_ball(unit_square):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    with pytest.raises(ValueError, match="closed-form"):
        _run(unit_square, 1, 2, [spec], [0.125, 0.0625], source="oracle")
    assert ball_oracle(domain=unit_square, m=1) is None


def test_build_level_can_skip_the_operator(unit_disk):
    level = build_level(domain=unit_disk, m=1, h=0.125, with_operator=False)
    assert level.op is None
    assert level.grid.interior_count > 0


def test_run_pairs_respect_the_exclusion(unit_ball_3d):
    run = _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25, 0.125])
    pairs = sample_run_pairs(run=run)
    assert pairs
    for pair in pairs:
        assert pair.sep >= run.min_distance
        assert min(pair.d_x, pair.d_y) >= run.min_distance


def test_snapped_pairs_lie_on_nodes(unit_ball_3d):
    run = _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25, 0.125])
    level = build_level(domain=unit_ball_3d, m=1, h=0.125, with_operator=False)
    for pair in sample_run_pairs(run=run):
        snapped = snap_pair(run=run, level=level, pair=pair)
        assert np.allclose(snapped.x / 0.125, np.round(snapped.x / 0.125))
        assert np.linalg.norm(snapped.x - pair.x) <= 0.125 * math.sqrt(3)


def test_oracle_run_on_the_disk(unit_disk):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    run = _run(unit_disk, 1, 2, [spec], [0.125, 0.0625], source="oracle")
    (report,) = verify_green_estimates(run=run)
    assert report.label == "green-even_i0_j0"
    assert report.grid_levels == [0.125, 0.0625]
    assert report.finite
    assert all(sup > 0 for sup in report.sup_by_level)
    assert report.stable


def test_solver_run_in_the_ball(unit_ball_3d):
    run = _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25, 0.125])
    (report,) = verify_green_estimates(run=run)
    assert report.finite
    assert all(sup > 0 for sup in report.sup_by_level)
    assert len(report.levels[-1].records) > 0


def test_regular_part_run_uses_the_max_form(unit_ball_3d):
    run = _run(unit_ball_3d, 1, 3, [REGULAR_3D], [0.25, 0.125])
    (report,) = verify_regular_part(run=run)
    assert report.finite
    for record in report.levels[-1].records:
        pair = record.pair
        assert record.rhs == pytest.approx(
            1.0 / max(pair.d_x, pair.d_y, pair.sep)
        )


def test_runs_refuse_the_other_family(unit_ball_3d):
    green = _run(unit_ball_3d, 1, 3, [GREEN_3D], [0.25, 0.125])
    with pytest.raises(SpecMismatchError):
        verify_regular_part(run=green)
    regular = _run(unit_ball_3d, 1, 3, [REGULAR_3D], [0.25, 0.125])
    with pytest.raises(SpecMismatchError):
        verify_green_estimates(run=regular)


def test_even_regular_run_records_the_log_free_sups(unit_disk):
    spec = BoundSpec(target=BoundTarget.REGULAR_EVEN, i=0, j=0)
    run = _run(unit_disk, 1, 2, [spec], [0.125, 0.0625], source="oracle")
    (report,) = verify_regular_part(run=run)
    assert "no_log_sup_level0" in report.notes
    assert "no_log_sup_level1" in report.notes
    assert report.notes["no_log_stable"] in (0.0, 1.0)


def test_run_rejects_cut_cell_for_biharmonic(unit_disk):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    with pytest.raises(ValueError, match="cut-cell"):
        _run(unit_disk, 2, 2, [spec], [0.125, 0.0625], boundary="cut-cell")
    with pytest.raises(ValueError, match="unknown boundary"):
        _run(unit_disk, 1, 2, [spec], [0.125, 0.0625], boundary="ghost")


def test_reports_note_the_pairs_per_region(unit_disk):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    run = _run(unit_disk, 1, 2, [spec], [0.125, 0.0625], source="oracle")
    (report,) = verify_green_estimates(run=run)
    counts = [report.notes[f"pairs_{region.value}"] for region in Region]
    assert sum(counts) == len(sample_run_pairs(run=run))


def test_close_pairs_far_from_the_boundary_are_reached(unit_disk):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    run = _run(
        unit_disk,
        1,
        2,
        [spec],
        [1 / 16, 1 / 32],
        source="oracle",
        exclusion=0.25,
    )
    (report,) = verify_green_estimates(run=run)
    assert report.notes["pairs_CaseII"] >= 1
    assert report.finite


def test_coarse_exclusion_leaves_close_pairs_unreached(unit_disk):
    # sep >= h = 0.125 cannot fall below max(d_x, d_y) / 25 <= 0.04.
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    run = _run(unit_disk, 1, 2, [spec], [0.125, 0.0625], source="oracle")
    with pytest.warns(RegionUnreachableWarning, match="CaseII received"):
        (report,) = verify_green_estimates(run=run)
    assert report.notes["pairs_CaseII"] == 0.0


PUNCTURED_BALL = Domain(kind=DomainKind.PUNCTURED_BALL, n=3, shape=(0.0,))
PLANAR_DOMAINS = {
    "square": (Domain(kind=DomainKind.RECTANGLE, n=2, shape=(1.0, 1.0)), 16),
    "ellipse": (Domain(kind=DomainKind.ELLIPSE, n=2, shape=(1.0, 0.1)), 48),
    "l-shape": (Domain(kind=DomainKind.L_SHAPE, n=2, shape=(1.0, 1.0)), 16),
}


def _assert_biharmonic_reports(reports):
    assert reports
    for report in reports:
        assert report.finite
        assert all(sup > 0 for sup in report.sup_by_level)
        assert report.stable, report.label
        assert "pairs_CaseIII" in report.notes


@pytest.mark.parametrize("regular", [False, True])
def test_biharmonic_estimates_in_the_punctured_ball(regular):
    params = DimensionParams(m=2, n=3)
    specs = admissible_specs(params=params, regular=regular, max_order=1)
    run = _run(PUNCTURED_BALL, 2, 3, specs, [1 / 8, 1 / 12])
    verify = verify_regular_part if regular else verify_green_estimates
    _assert_biharmonic_reports(verify(run=run))


@pytest.mark.parametrize("regular", [False, True])
@pytest.mark.parametrize("name", sorted(PLANAR_DOMAINS))
def test_biharmonic_estimates_on_planar_domains(name, regular):
    domain, nodes = PLANAR_DOMAINS[name]
    params = DimensionParams(m=2, n=2)
    specs = admissible_specs(params=params, regular=regular, max_order=1)
    levels = [1 / nodes, 1 / (nodes + nodes // 2)]
    run = _run(domain, 2, 2, specs, levels)
    verify = verify_regular_part if regular else verify_green_estimates
    _assert_biharmonic_reports(verify(run=run))


@pytest.mark.slow
def test_solver_tracks_oracle_within_15_percent_at_h_1_32(unit_ball_3d):
    levels = [1 / 16, 1 / 32]
    solver = _run(unit_ball_3d, 1, 3, [GREEN_3D], levels, exclusion=4.0)
    oracle = _run(
        unit_ball_3d, 1, 3, [GREEN_3D], levels, "oracle", exclusion=4.0
    )
    (first,) = verify_green_estimates(run=solver)
    (second,) = verify_green_estimates(run=oracle)
    assert first.stable
    assert _ratio_change(first, second) < 0.15


@pytest.mark.slow
def test_cut_cell_solver_tracks_oracle_within_2_percent(unit_disk):
    spec = BoundSpec(target=BoundTarget.GREEN_EVEN, i=0, j=0)
    levels = [1 / 64, 1 / 128]
    solver = _run(
        unit_disk, 1, 2, [spec], levels, exclusion=8.0, boundary="cut-cell"
    )
    oracle = _run(unit_disk, 1, 2, [spec], levels, "oracle", exclusion=8.0)
    (first,) = verify_green_estimates(run=solver)
    (second,) = verify_green_estimates(run=oracle)
    assert first.stable
    assert _ratio_change(first, second) <= 0.02
