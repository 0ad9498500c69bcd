"""Run configuration: a JSON object per run, loaded with jsons and checked
field by field before any solve."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import jsons
from jsons.exceptions import JsonsError
from typeguard import typechecked

from polygreen.estimates.bound_spec import (
    BoundSpec,
    BoundTarget,
    admissible_specs,
    validate_spec,
)
from polygreen.exceptions import (
    ConfigError,
    DimensionOutOfRangeError,
    SpecMismatchError,
)
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.domain import Domain, DomainKind
from polygreen.geometry.sampling import RegionClassifier
from polygreen.harness.verification_run import (
    LHS_SOURCES,
    SamplePlan,
    VerificationRun,
)
from polygreen.solver.grid import DEFAULT_NODE_CAP
from polygreen.solver.operator import BOUNDARY_TREATMENTS

logger = logging.getLogger(__name__)

DECAY_FORMS = ("interior", "infinity")


@dataclass
class Domain_config:
    """Domain kind by configuration name plus its shape parameters."""

    kind: str = DomainKind.UNIT_BALL.value
    shape: List[float] = field(default_factory=list)


@dataclass
class Sample_config:
    """Pair sampling plan."""

    count: int = 40
    seed: int = 0
    min_sep: float = 0.0


@dataclass
class Bound_config:
    """One estimate by target name and derivative orders."""

    target: str
    i: int = 0
    j: int = 0


def _offending_order(entry: Bound_config, params: DimensionParams) -> str:
    for name, order in (("i", entry.i), ("j", entry.j)):
        if not 0 <= order <= params.lam:
            return name
    return "target"


@dataclass
class Run_config:
    """Parameters shared by all subcommands.

    An empty bound_specs list selects every admissible estimate of the
    subcommand's family.
    """

    m: int = 1
    n: int = 3
    domain: Domain_config = field(default_factory=Domain_config)
    grid_levels: List[float] = field(default_factory=lambda: [0.125, 0.0625])
    samples: Sample_config = field(default_factory=Sample_config)
    bound_specs: List[Bound_config] = field(default_factory=list)
    classifier_n: float = 25.0
    exclusion: float = 8.0
    lhs_source: str = "solver"
    boundary: str = "zero-extension"
    node_cap: int = DEFAULT_NODE_CAP
    decay_form: str = "interior"
    decay_radius: float = 0.2
    hardy_trials: int = 50
    source: List[float] = field(default_factory=list)
    output_dir: str = "results"

    @typechecked
    def params(self) -> DimensionParams:
        """Returns (m, n) after range checks."""
        try:
            return DimensionParams(m=self.m, n=self.n)
        except DimensionOutOfRangeError as error:
            raise ConfigError("config.n", str(error)) from error

    @typechecked
    def build_domain(self) -> Domain:
        """Returns the configured domain."""
        try:
            kind = DomainKind(self.domain.kind)
        except ValueError as error:
            raise ConfigError(
                "config.domain.kind",
                f"unknown kind:{self.domain.kind}, expected one of "
                + f"{[k.value for k in DomainKind]}",
            ) from error
        try:
            return Domain(kind=kind, n=self.n, shape=tuple(self.domain.shape))
        except ValueError as error:
            raise ConfigError("config.domain.shape", str(error)) from error

    @typechecked
    def specs(self, *, regular: bool) -> List[BoundSpec]:
        """Returns the configured estimates, validated against (m, n)."""
        params = self.params()
        if not self.bound_specs:
            return admissible_specs(params=params, regular=regular)
        specs = []
        for index, entry in enumerate(self.bound_specs):
            path = f"config.bound_specs[{index}]"
            try:
                target = BoundTarget(entry.target)
            except ValueError as error:
                raise ConfigError(
                    f"{path}.target", f"unknown target:{entry.target}"
                ) from error
            if target.is_regular != regular:
                raise ConfigError(
                    f"{path}.target",
                    f"{entry.target} does not belong to this subcommand",
                )
            spec = BoundSpec(target=target, i=entry.i, j=entry.j)
            try:
                validate_spec(spec=spec, params=params)
            except SpecMismatchError as error:
                raise ConfigError(
                    f"{path}.{_offending_order(entry, params)}", str(error)
                ) from error
            specs.append(spec)
        return specs

    @typechecked
    def validate(self) -> None:
        """Raises ConfigError naming the first invalid field."""
        self.params()
        self.build_domain()
        if len(self.grid_levels) < 2:
            raise ConfigError(
                "config.grid_levels", "at least 2 levels are needed"
            )
        for index, h in enumerate(self.grid_levels):
            if h <= 0:
                raise ConfigError(
                    f"config.grid_levels[{index}]", f"h must be positive:{h}"
                )
        if sorted(self.grid_levels, reverse=True) != self.grid_levels:
            raise ConfigError(
                "config.grid_levels", "levels must go coarse to fine"
            )
        if self.samples.count < 1:
            raise ConfigError(
                "config.samples.count",
                f"must be positive:{self.samples.count}",
            )
        if self.samples.min_sep < 0:
            raise ConfigError(
                "config.samples.min_sep",
                f"must be >= 0:{self.samples.min_sep}",
            )
        if self.classifier_n < 25:
            raise ConfigError(
                "config.classifier_n", f"must be >= 25:{self.classifier_n}"
            )
        if self.lhs_source not in LHS_SOURCES:
            raise ConfigError(
                "config.lhs_source",
                f"unknown source:{self.lhs_source}, expected one of "
                + f"{LHS_SOURCES}",
            )
        if self.boundary not in BOUNDARY_TREATMENTS:
            raise ConfigError(
                "config.boundary",
                f"unknown treatment:{self.boundary}, expected one of "
                + f"{BOUNDARY_TREATMENTS}",
            )
        if self.boundary == "cut-cell" and self.m != 1:
            raise ConfigError(
                "config.boundary", f"cut-cell needs m=1, got m={self.m}"
            )
        if self.decay_form not in DECAY_FORMS:
            raise ConfigError(
                "config.decay_form",
                f"unknown form:{self.decay_form}, expected one of "
                + f"{DECAY_FORMS}",
            )
        if self.decay_radius <= 0:
            raise ConfigError(
                "config.decay_radius", f"must be positive:{self.decay_radius}"
            )
        if self.hardy_trials < 1:
            raise ConfigError(
                "config.hardy_trials", f"must be positive:{self.hardy_trials}"
            )
        if self.source and len(self.source) != self.n:
            raise ConfigError(
                "config.source", f"needs {self.n} coordinates:{self.source}"
            )

    @typechecked
    def run(self, *, regular: bool) -> VerificationRun:
        """Returns the estimate verification run of this configuration."""
        self.validate()
        try:
            return VerificationRun(
                domain=self.build_domain(),
                params=self.params(),
                grid_levels=list(self.grid_levels),
                plan=SamplePlan(
                    count=self.samples.count,
                    seed=self.samples.seed,
                    min_sep=self.samples.min_sep,
                ),
                specs=self.specs(regular=regular),
                classifier=RegionClassifier(N=self.classifier_n),
                exclusion=self.exclusion,
                lhs_source=self.lhs_source,
                node_cap=self.node_cap,
                boundary=self.boundary,
            )
        except ConfigError:
            raise
        except ValueError as error:
            raise ConfigError("config", str(error)) from error


@typechecked
def load_config(*, path: Optional[Path] = None) -> Run_config:
    """Returns the configuration stored at path, defaults without one."""
    if path is None:
        return Run_config()
    try:
        with open(path, encoding="utf-8") as config_file:
            raw = config_file.read()
        config = jsons.loads(raw, Run_config, strict=True)
    except OSError as error:
        raise ConfigError("config", f"cannot read {path}: {error}") from error
    except JsonsError as error:
        raise ConfigError("config", f"cannot parse {path}: {error}") from error
    logger.debug("Loaded configuration from %s.", path)
    return config


@typechecked
def dump_config(*, config: Run_config) -> Dict[str, Any]:
    """Returns the JSON-ready echo of a configuration."""
    return jsons.dump(config, strip_privates=True)
