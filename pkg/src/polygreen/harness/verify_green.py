"""Measures the pointwise Green function and regular part estimates on
sampled pairs across grid levels."""
import logging
from typing import Callable, Dict, List, Tuple

from typeguard import typechecked

from polygreen.estimates.bound_spec import BoundSpec, BoundTarget
from polygreen.estimates.bounds import (
    assert_split_agreement,
    bound_rhs,
    bound_rhs_regular,
)
from polygreen.estimates.report import (
    EstimateRecord,
    EstimateReport,
    LevelRecords,
    ratio_statistics,
    refinement_stable,
)
from polygreen.exceptions import SpecMismatchError
from polygreen.fundamental.dimension_params import multi_indices
from polygreen.geometry.sampling import (
    Region,
    SamplePair,
    classify_region,
    make_pair,
    region_counts,
    sample_interior_pairs,
)
from polygreen.harness.verification_run import (
    Level,
    VerificationRun,
    ball_oracle,
    build_level,
)
from polygreen.parallel import parallel_map
from polygreen.solver.differences import point_stencil
from polygreen.solver.green import (
    GreenColumns,
    PairKernel,
    stencil_mixed_norm,
    subtract_gamma,
)

logger = logging.getLogger(__name__)

COLUMN_BUDGET = 64
MAX_FORM_RTOL = 1e-12


@typechecked
def sample_run_pairs(*, run: VerificationRun) -> List[SamplePair]:
    """Samples the pairs of a run and drops those that break the exclusion
    rules of the coarsest level."""
    reach = run.min_distance
    pairs = sample_interior_pairs(
        domain=run.domain,
        count=run.plan.count,
        seed=run.plan.seed,
        min_sep=max(run.plan.min_sep, reach),
        cls=run.classifier,
    )
    kept = [p for p in pairs if min(p.d_x, p.d_y) >= reach]
    logger.info(
        "Kept %d of %d sampled pairs at distance >= %g from the boundary.",
        len(kept),
        len(pairs),
        reach,
    )
    return kept


@typechecked
def snap_pair(
    *, run: VerificationRun, level: Level, pair: SamplePair
) -> SamplePair:
    """Returns the pair moved to its nearest grid nodes."""
    grid = level.grid
    x = grid.node_point(index=grid.snap_interior(point=pair.x))
    y = grid.node_point(index=grid.snap_interior(point=pair.y))
    return make_pair(domain=run.domain, x=x, y=y)


def _max_orders(specs: List[BoundSpec]) -> Tuple[int, int]:
    return max(s.i for s in specs), max(s.j for s in specs)


def _chunks(
    pairs: List[SamplePair], columns_per_pair: int
) -> List[List[SamplePair]]:
    size = max(1, COLUMN_BUDGET // max(1, columns_per_pair))
    return [pairs[k : k + size] for k in range(0, len(pairs), size)]


def _level_kernel(
    run: VerificationRun, level: Level
) -> Tuple[PairKernel, Callable[[List[SamplePair]], None], Callable[[], None]]:
    """Returns the Green kernel of a level with its prefetch and release
    hooks."""
    if run.lhs_source == "oracle":
        oracle = ball_oracle(domain=run.domain, m=run.params.m)
        return oracle.values, lambda pairs: None, lambda: None
    columns = GreenColumns(op=level.op)
    _, top_j = _max_orders(run.specs)
    alphas = [
        alpha
        for j in range(top_j + 1)
        for alpha in multi_indices(n=run.params.n, order=j)
    ]

    def prefetch(pairs: List[SamplePair]) -> None:
        nodes = set()
        for pair in pairs:
            node = level.grid.snap(point=pair.y)
            nodes.update(
                columns.source_stencil_nodes(node=node, alphas=alphas)
            )
        columns.prefetch(nodes=sorted(nodes))

    return columns.kernel, prefetch, columns.clear


def _columns_per_pair(run: VerificationRun) -> int:
    _, top_j = _max_orders(run.specs)
    offsets = {
        offset
        for j in range(top_j + 1)
        for alpha in multi_indices(n=run.params.n, order=j)
        for offset, _ in point_stencil(multi=alpha, h=1.0)
    }
    return len(offsets)


@typechecked
def _measure(
    *,
    run: VerificationRun,
    level: Level,
    pairs: List[SamplePair],
    regular: bool,
) -> Dict[str, List[EstimateRecord]]:
    """Returns the records of every spec on one level."""
    kernel, prefetch, release = _level_kernel(run, level)
    if regular:
        kernel = subtract_gamma(
            kernel=kernel, params=run.params, diam=run.domain.diameter
        )
    records: Dict[str, List[EstimateRecord]] = {
        spec.label: [] for spec in run.specs
    }
    diam = run.domain.diameter

    def evaluate(pair: SamplePair) -> List[Tuple[str, EstimateRecord]]:
        region = classify_region(pair=pair, cls=run.classifier)
        out = []
        for spec in run.specs:
            lhs = stencil_mixed_norm(
                kernel=kernel,
                x=pair.x,
                y=pair.y,
                i=spec.i,
                j=spec.j,
                h=level.h,
            )
            rhs = bound_rhs(
                spec=spec, params=run.params, pair=pair, diam=diam
            )
            assert_split_agreement(
                spec=spec, params=run.params, pair=pair, diam=diam
            )
            out.append(
                (
                    spec.label,
                    EstimateRecord(
                        pair=pair, region=region, lhs=lhs, rhs=rhs
                    ),
                )
            )
        return out

    for chunk in _chunks(pairs, _columns_per_pair(run)):
        prefetch(chunk)
        for results in parallel_map(evaluate, chunk):
            for label, record in results:
                records[label].append(record)
        release()
    return records


@typechecked
def _run_levels(
    *, run: VerificationRun, regular: bool
) -> Tuple[Dict[str, List[LevelRecords]], Dict[Region, int]]:
    """Returns the records of every spec per level and the number of
    sampled pairs per region."""
    for spec in run.specs:
        if spec.target.is_regular != regular:
            raise SpecMismatchError(
                f"Error, {spec.target.value} does not belong to the "
                + f"{'regular part' if regular else 'Green function'} run."
            )
    pairs = sample_run_pairs(run=run)
    counts = region_counts(pairs=pairs, cls=run.classifier)
    logger.info(
        "Pairs per region: %s.", {r.value: c for r, c in counts.items()}
    )
    per_spec: Dict[str, List[LevelRecords]] = {
        s.label: [] for s in run.specs
    }
    for h in run.grid_levels:
        level = build_level(
            domain=run.domain,
            m=run.params.m,
            h=h,
            with_operator=run.lhs_source == "solver",
            node_cap=run.node_cap,
            boundary=run.boundary,
        )
        snapped = [snap_pair(run=run, level=level, pair=p) for p in pairs]
        snapped = [p for p in snapped if p.sep > 0]
        records = _measure(
            run=run, level=level, pairs=snapped, regular=regular
        )
        for label, level_records in records.items():
            per_spec[label].append(LevelRecords(h=h, records=level_records))
    return per_spec, counts


def _note_regions(report: EstimateReport, counts: Dict[Region, int]) -> None:
    for region, count in counts.items():
        report.notes[f"pairs_{region.value}"] = float(count)


@typechecked
def verify_green_estimates(*, run: VerificationRun) -> List[EstimateReport]:
    """Checks the Green function estimates, LHS = |nabla_x^i nabla_y^j G|."""
    per_spec, counts = _run_levels(run=run, regular=False)
    reports = []
    for spec in run.specs:
        report = ratio_statistics(
            label=spec.label, levels=per_spec[spec.label]
        )
        _note_regions(report, counts)
        logger.info(
            "%s: sup ratios %s, stable=%s.",
            spec.label,
            report.sup_by_level,
            report.stable,
        )
        reports.append(report)
    return reports


def _check_max_form(records: List[EstimateRecord]) -> None:
    """For odd n and i = j = lambda the high regular bound is
    1/max{d_x, d_y, sep}."""
    for record in records:
        pair = record.pair
        expected = 1.0 / max(pair.d_x, pair.d_y, pair.sep)
        if abs(record.rhs - expected) > MAX_FORM_RTOL * expected:
            raise ValueError(
                f"Error, critical regular bound {record.rhs} differs from "
                + f"1/max{{d_x, d_y, sep}}={expected}"
            )


@typechecked
def verify_regular_part(*, run: VerificationRun) -> List[EstimateReport]:
    """Checks the regular part estimates, LHS = |nabla_x^i nabla_y^j S|.

    Even-dimension reports carry the sup ratios without the logarithm in
    notes, as a sharpness observation.
    """
    per_spec, counts = _run_levels(run=run, regular=True)
    lam = run.params.lam
    diam = run.domain.diameter
    reports = []
    for spec in run.specs:
        levels = per_spec[spec.label]
        report = ratio_statistics(label=spec.label, levels=levels)
        _note_regions(report, counts)
        critical = spec.i == spec.j == lam
        if spec.target == BoundTarget.REGULAR_ODD_HIGH and critical:
            for level in levels:
                _check_max_form(level.records)
        if spec.target == BoundTarget.REGULAR_EVEN:
            sups = []
            for index, level in enumerate(levels):
                ratios = [
                    r.lhs
                    / bound_rhs_regular(
                        spec=spec,
                        params=run.params,
                        pair=r.pair,
                        diam=diam,
                        include_log=False,
                    )
                    for r in level.records
                ]
                sups.append(max(ratios, default=0.0))
                report.notes[f"no_log_sup_level{index}"] = sups[-1]
            report.notes["no_log_stable"] = float(refinement_stable(sups=sups))
        logger.info(
            "%s: sup ratios %s, stable=%s.",
            spec.label,
            report.sup_by_level,
            report.stable,
        )
        reports.append(report)
    return reports

