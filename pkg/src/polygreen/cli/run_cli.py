"""Command-line entry point.

Exit codes: 0 when every executed check passes, 1 when one fails and 2
for invalid configurations. Diagnostics go to standard error; only the
fundsol CSV may go to standard output.
"""
import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, TextIO

import numpy as np
from typeguard import typechecked

from polygreen import __version__
from polygreen.cli.run_config import (
    Bound_config,
    Run_config,
    dump_config,
    load_config,
)
from polygreen.cli.write_reports import (
    merge_summaries,
    plot_refinement,
    write_reports,
    write_summary,
)
from polygreen.estimates.report import CheckReport, EstimateReport
from polygreen.exceptions import (
    ConfigError,
    DimensionOutOfRangeError,
    EmptyInputError,
    GeometryInfeasibleError,
    InvalidParityError,
    SpecMismatchError,
)
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
    multi_indices,
    multinomial_weight,
)
from polygreen.fundamental.fundamental_solution import (
    gamma_derivative_values,
    gamma_values,
)
from polygreen.harness.verification_run import build_level
from polygreen.harness.verify_counterexample import verify_counterexample
from polygreen.harness.verify_decay import (
    verify_decay_at_infinity,
    verify_interior_decay,
)
from polygreen.harness.verify_dirichlet import (
    bump_data,
    verify_dirichlet_bound,
)
from polygreen.harness.verify_green import (
    verify_green_estimates,
    verify_regular_part,
)
from polygreen.harness.verify_hardy import verify_hardy
from polygreen.harness.verify_symmetry import verify_symmetry_and_sign
from polygreen.solver.field_dump import write_field_dump, write_slice_csv
from polygreen.solver.green import discrete_green, regular_part

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

# Errors that mean the requested run is not admissible.
CONFIG_ERRORS = (
    ConfigError,
    DimensionOutOfRangeError,
    EmptyInputError,
    InvalidParityError,
    SpecMismatchError,
    GeometryInfeasibleError,
)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--m", type=int, help="operator order")
    parser.add_argument("--n", type=int, help="space dimension")
    parser.add_argument(
        "--grid-levels", type=float, nargs="+", help="mesh widths"
    )
    parser.add_argument("--seed", type=int, help="sampling seed")
    parser.add_argument("--count", type=int, help="number of sampled pairs")
    parser.add_argument(
        "--domain", help="domain kind, e.g. unit-ball or rectangle"
    )
    parser.add_argument(
        "--shape", type=float, nargs="*", help="domain shape parameters"
    )
    parser.add_argument(
        "--spec",
        action="append",
        help="estimate as target:i:j, e.g. green-odd-high:1:0",
    )
    parser.add_argument("--lhs-source", choices=("solver", "oracle"))
    parser.add_argument(
        "--boundary",
        choices=("zero-extension", "cut-cell"),
        help="boundary treatment of the solver, cut-cell for m=1 only",
    )
    parser.add_argument("--out", type=Path, help="output directory")


@typechecked
def build_parser() -> argparse.ArgumentParser:
    """Returns the parser with one subcommand per check."""
    parser = argparse.ArgumentParser(
        prog="polygreen",
        description="Polyharmonic Green functions and their estimates.",
    )
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument(
        "--version", action="version", version=f"polygreen {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fundsol = sub.add_parser("fundsol", help="fundamental solution on a ray")
    fundsol.add_argument("--m", type=int, required=True)
    fundsol.add_argument("--n", type=int, required=True)
    fundsol.add_argument("--r", type=float, nargs="+", required=True)
    fundsol.add_argument("--order", type=int, default=0)
    fundsol.add_argument("--diam", type=float, default=1.0)
    fundsol.add_argument("--out", type=Path)

    green = sub.add_parser("green", help="dump G_h and S_h for one source")
    _add_run_options(green)
    green.add_argument("--y", type=float, nargs="+", help="source point")
    green.add_argument("--h", type=float, help="mesh width")

    for name in ("verify-green", "verify-regular", "dirichlet-bound"):
        _add_run_options(sub.add_parser(name))
    counter = sub.add_parser("counterexample")
    _add_run_options(counter)
    decay = sub.add_parser("decay")
    _add_run_options(decay)
    decay.add_argument("--form", choices=("interior", "infinity"))
    decay.add_argument("--radius", type=float)
    hardy = sub.add_parser("hardy")
    _add_run_options(hardy)
    hardy.add_argument("--trials", type=int)
    symmetry = sub.add_parser("symmetry")
    _add_run_options(symmetry)

    report = sub.add_parser("report", help="merge run summaries")
    report.add_argument("inputs", type=Path, nargs="+")
    report.add_argument("--out", type=Path, required=True)
    report.add_argument("--plot", action="store_true")
    return parser


def _parse_spec(text: str, index: int) -> Bound_config:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(
            f"config.bound_specs[{index}]", f"expected target:i:j, got {text}"
        )
    try:
        return Bound_config(target=parts[0], i=int(parts[1]), j=int(parts[2]))
    except ValueError as error:
        raise ConfigError(
            f"config.bound_specs[{index}]", f"orders must be integers:{text}"
        ) from error


@typechecked
def resolve_config(*, args: argparse.Namespace) -> Run_config:
    """Loads the configuration file and applies the command-line flags."""
    config = load_config(path=getattr(args, "config", None))
    overrides = {
        "m": "m",
        "n": "n",
        "grid_levels": "grid_levels",
        "lhs_source": "lhs_source",
        "boundary": "boundary",
        "form": "decay_form",
        "radius": "decay_radius",
        "trials": "hardy_trials",
    }
    for flag, name in overrides.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, name, value)
    if getattr(args, "seed", None) is not None:
        config.samples.seed = args.seed
    if getattr(args, "count", None) is not None:
        config.samples.count = args.count
    if getattr(args, "domain", None) is not None:
        config.domain.kind = args.domain
    if getattr(args, "shape", None) is not None:
        config.domain.shape = list(args.shape)
    if getattr(args, "spec", None):
        config.bound_specs = [
            _parse_spec(text, index) for index, text in enumerate(args.spec)
        ]
    if getattr(args, "out", None) is not None:
        config.output_dir = str(args.out)
    config.validate()
    return config


@typechecked
def fundsol_rows(
    *, m: int, n: int, radii: List[float], order: int, diam: float
) -> List[List[float]]:
    """Returns r, Gamma and |nabla^k Gamma| for k = 1..order at r e_1."""
    params = DimensionParams(m=m, n=n)
    points = np.zeros((len(radii), n))
    points[:, 0] = radii
    columns = [gamma_values(params=params, points=points, diam=diam)]
    zero = MultiIndex.zero(n)
    for k in range(1, order + 1):
        total = np.zeros(len(radii))
        for beta in multi_indices(n=n, order=k):
            values = gamma_derivative_values(
                params=params,
                alpha_x=beta,
                alpha_y=zero,
                points=points,
                diam=diam,
            )
            total += multinomial_weight(multi=beta) * values**2
        columns.append(np.sqrt(total))
    return [
        [float(r)] + [float(column[row]) for column in columns]
        for row, r in enumerate(radii)
    ]


def _write_fundsol(
    rows: List[List[float]], order: int, handle: TextIO
) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(
        ["r", "value"] + [f"grad{k}_norm" for k in range(1, order + 1)]
    )
    for row in rows:
        writer.writerow([f"{v:.17g}" for v in row])


def _cmd_fundsol(args: argparse.Namespace) -> int:
    for r in args.r:
        if not r > 0:
            raise ConfigError("config.r", f"radii must be positive:{r}")
    try:
        rows = fundsol_rows(
            m=args.m, n=args.n, radii=args.r, order=args.order, diam=args.diam
        )
    except DimensionOutOfRangeError as error:
        raise ConfigError("config.n", str(error)) from error
    if args.out is None:
        _write_fundsol(rows, args.order, sys.stdout)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            _write_fundsol(rows, args.order, handle)
    return EXIT_PASS


def _cmd_green(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    domain = config.build_domain()
    params = config.params()
    h = args.h if args.h is not None else config.grid_levels[-1]
    y = np.array(args.y or config.source or [0.0] * config.n, dtype=float)
    if len(y) != config.n:
        raise ConfigError("config.source", f"needs {config.n} coordinates")
    config.validate()
    level = build_level(
        domain=domain, m=params.m, h=h, boundary=config.boundary
    )
    green = discrete_green(op=level.op, y=y)
    regular = regular_part(green=green, params=params, diam=domain.diameter)
    out = Path(config.output_dir)
    for name, field in (("green", green), ("regular", regular)):
        write_field_dump(field=field, path=out / f"{name}_h{h:g}.bin")
        write_slice_csv(field=field, path=out / f"{name}_h{h:g}.csv")
    logger.info("Wrote G_h and S_h for y=%s to %s.", y, out)
    return EXIT_PASS


def _finish(
    config: Run_config,
    reports: List[EstimateReport],
    checks: List[CheckReport],
) -> int:
    write_reports(
        reports=reports,
        checks=checks,
        directory=Path(config.output_dir),
        config=dump_config(config=config),
    )
    passed = all(r.passed for r in reports) and all(c.passed for c in checks)
    for report in reports:
        logger.info("%s: passed=%s.", report.label, report.passed)
    for check in checks:
        logger.info("%s: %s.", check.name, check.verdicts)
    return EXIT_PASS if passed else EXIT_FAIL


def _cmd_estimates(args: argparse.Namespace, regular: bool) -> int:
    config = resolve_config(args=args)
    run = config.run(regular=regular)
    if regular:
        reports = verify_regular_part(run=run)
    else:
        reports = verify_green_estimates(run=run)
    return _finish(config, reports, [])


def _cmd_counterexample(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    check = verify_counterexample(
        m=config.m, n=config.n, grid_levels=list(config.grid_levels)
    )
    return _finish(config, [], [check])


def _exterior_point(config: Run_config) -> np.ndarray:
    domain = config.build_domain()
    if config.source:
        anchor = np.array(config.source, dtype=float)
    else:
        rng = np.random.Generator(np.random.Philox(config.samples.seed))
        anchor = domain.sample_interior_point(rng=rng)
    return domain.exterior_point(x=anchor)


def _cmd_decay(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    verify = (
        verify_interior_decay
        if config.decay_form == "interior"
        else verify_decay_at_infinity
    )
    check = verify(
        domain=config.build_domain(),
        params=config.params(),
        q=_exterior_point(config),
        radius=config.decay_radius,
        grid_levels=list(config.grid_levels),
    )
    return _finish(config, [], [check])


def _cmd_dirichlet(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    domain, params = config.build_domain(), config.params()
    data = bump_data(domain=domain, params=params, seed=config.samples.seed)
    check = verify_dirichlet_bound(
        domain=domain,
        params=params,
        data=data,
        grid_levels=list(config.grid_levels),
        seed=config.samples.seed,
    )
    return _finish(config, [], [check])


def _cmd_hardy(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    check = verify_hardy(
        domain=config.build_domain(),
        m=config.m,
        trials=config.hardy_trials,
        seed=config.samples.seed,
        grid_levels=list(config.grid_levels),
    )
    return _finish(config, [], [check])


def _cmd_symmetry(args: argparse.Namespace) -> int:
    config = resolve_config(args=args)
    check = verify_symmetry_and_sign(
        domain=config.build_domain(),
        params=config.params(),
        h=config.grid_levels[-1],
        seed=config.samples.seed,
    )
    return _finish(config, [], [check])


def _cmd_report(args: argparse.Namespace) -> int:
    for path in args.inputs:
        if not path.is_file():
            raise ConfigError("config.inputs", f"no summary at {path}")
    summary = merge_summaries(paths=list(args.inputs))
    args.out.mkdir(parents=True, exist_ok=True)
    write_summary(summary=summary, path=args.out / "summary.json")
    if args.plot:
        plot_refinement(summary=summary, path=args.out / "refinement.png")
    return EXIT_PASS if summary["passed"] else EXIT_FAIL


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "fundsol": _cmd_fundsol,
    "green": _cmd_green,
    "verify-green": lambda args: _cmd_estimates(args, regular=False),
    "verify-regular": lambda args: _cmd_estimates(args, regular=True),
    "counterexample": _cmd_counterexample,
    "decay": _cmd_decay,
    "dirichlet-bound": _cmd_dirichlet,
    "hardy": _cmd_hardy,
    "symmetry": _cmd_symmetry,
    "report": _cmd_report,
}


def _configure_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
    )
    root = logging.getLogger("polygreen")
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


@typechecked
def run_cli(argv: Optional[List[str]] = None) -> int:
    """Runs one subcommand and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return EXIT_CONFIG if error.code else EXIT_PASS
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except CONFIG_ERRORS as error:
        logger.error("%s", error)
        return EXIT_CONFIG


def main() -> None:
    """Console script entry point."""
    sys.exit(run_cli(sys.argv[1:]))
