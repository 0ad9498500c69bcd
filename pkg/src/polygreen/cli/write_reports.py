"""Writes estimate records to CSV and all outcomes to a JSON summary.

CSV floats carry 17 significant digits and points are written as
coordinates joined by ';', so identical runs give identical files.
"""
import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import jsons
from typeguard import typechecked

from polygreen import __version__
from polygreen.estimates.report import CheckReport, EstimateReport

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("x", "y", "d_x", "d_y", "sep", "region", "lhs", "rhs", "ratio")
SUMMARY_NAME = "summary.json"


def _number(value: float) -> str:
    return f"{float(value):.17g}"


def _point(point: Any) -> str:
    return ";".join(_number(v) for v in point)


@typechecked
def csv_name(*, label: str, level: int) -> str:
    """Returns the file name of one estimate on one level."""
    return f"{label}_level{level}.csv"


@typechecked
def write_level_csv(*, report: EstimateReport, level: int, path: Path) -> Path:
    """Writes the records of one level of an estimate report."""
    with open(path, "w", newline="", encoding="utf-8") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in report.levels[level].records:
            pair = record.pair
            writer.writerow(
                [
                    _point(pair.x),
                    _point(pair.y),
                    _number(pair.d_x),
                    _number(pair.d_y),
                    _number(pair.sep),
                    record.region.value,
                    _number(record.lhs),
                    _number(record.rhs),
                    _number(record.ratio),
                ]
            )
    return path


@typechecked
def estimate_summary(*, report: EstimateReport) -> Dict[str, Any]:
    """Returns the JSON-ready outcome of one estimate."""
    return {
        "grid_levels": report.grid_levels,
        "sup_by_level": report.sup_by_level,
        "region_sups": report.region_sups,
        "sup_ratio": report.sup_ratio,
        "stable": report.stable,
        "passed": report.passed,
        "notes": report.notes,
    }


@typechecked
def check_summary(*, report: CheckReport) -> Dict[str, Any]:
    """Returns the JSON-ready outcome of one check."""
    return {
        "verdicts": report.verdicts,
        "measurements": report.measurements,
        "notes": report.notes,
        "passed": report.passed,
    }


@typechecked
def build_summary(
    *,
    reports: List[EstimateReport],
    checks: List[CheckReport],
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Returns the summary of a run: outcomes, grid levels, config echo and
    version."""
    levels = sorted(
        {h for report in reports for h in report.grid_levels}, reverse=True
    )
    passed = all(r.passed for r in reports) and all(c.passed for c in checks)
    return {
        "version": __version__,
        "grid_levels": levels,
        "specs": {r.label: estimate_summary(report=r) for r in reports},
        "checks": {c.name: check_summary(report=c) for c in checks},
        "config": config or {},
        "passed": passed,
    }


@typechecked
def write_summary(*, summary: Dict[str, Any], path: Path) -> Path:
    """Writes a summary as sorted, indented JSON."""
    text = jsons.dumps(summary, jdkwargs={"sort_keys": True, "indent": 2})
    path.write_text(text + "\n", encoding="utf-8")
    return path


@typechecked
def write_reports(
    *,
    reports: List[EstimateReport],
    directory: Path,
    checks: Optional[List[CheckReport]] = None,
    config: Optional[Dict[str, Any]] = None,
) -> List[Path]:
    """Writes one CSV per estimate and level plus the JSON summary.

    :param config: Configuration echo stored in the summary.
    """
    checks = checks or []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for report in reports:
            for level in range(len(report.levels)):
                path = directory / csv_name(label=report.label, level=level)
                written.append(
                    write_level_csv(report=report, level=level, path=path)
                )
        summary = build_summary(reports=reports, checks=checks, config=config)
        written.append(
            write_summary(summary=summary, path=directory / SUMMARY_NAME)
        )
    except OSError as error:
        logger.error("Could not write reports to %s: %s", directory, error)
        raise
    logger.info("Wrote %d report files to %s.", len(written), directory)
    return written


@typechecked
def merge_summaries(*, paths: List[Path]) -> Dict[str, Any]:
    """Merges run summaries into one; later files win on equal names."""
    merged: Dict[str, Any] = {
        "version": __version__,
        "grid_levels": [],
        "specs": {},
        "checks": {},
        "runs": [],
    }
    levels = set()
    for path in paths:
        summary = jsons.loads(path.read_text(encoding="utf-8"), dict)
        merged["specs"].update(summary.get("specs", {}))
        merged["checks"].update(summary.get("checks", {}))
        merged["runs"].append(str(path))
        levels.update(summary.get("grid_levels", []))
    merged["grid_levels"] = sorted(levels, reverse=True)
    merged["passed"] = all(
        entry["passed"]
        for group in ("specs", "checks")
        for entry in merged[group].values()
    )
    return merged


@typechecked
def plot_refinement(*, summary: Dict[str, Any], path: Path) -> Path:
    """Plots the sup ratio of every estimate against the mesh width."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, entry in sorted(summary["specs"].items()):
        ax.loglog(
            entry["grid_levels"],
            entry["sup_by_level"],
            marker="o",
            label=label,
        )
    ax.set_xlabel("h")
    ax.set_ylabel("sup ratio")
    ax.invert_xaxis()
    if summary["specs"]:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
