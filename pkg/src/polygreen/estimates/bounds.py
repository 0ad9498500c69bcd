"""Right-hand sides of the pointwise Green function estimates with C = 1.

With e = n - 2m + i + j and the boundary prefactor
    pref = min{1, (d_x/sep)^(lambda-i), (d_y/sep)^(lambda-j)}
the Green function bounds read
    green-odd-high: pref sep^-e
    green-odd-low:  pref sep^-e min{sep/d_x, sep/d_y, 1}^e
    green-even:     the low form times log(1 + min{d_x, d_y}/sep)
and the regular part bounds
    regular-odd-high: max{d_x, d_y, sep}^-e
    regular-odd-low:  sep^-e min{sep/d_x, sep/d_y, 1}^e
    regular-even:     the low form times log(1 + diam/max{d_x, d_y, sep}).
"""
import math

from typeguard import typechecked

from polygreen.estimates.bound_spec import (
    BoundSpec,
    BoundTarget,
    validate_spec,
)
from polygreen.fundamental.dimension_params import DimensionParams
from polygreen.geometry.sampling import SamplePair

SPLIT_RTOL = 1e-12


def _exponent(spec: BoundSpec, params: DimensionParams) -> int:
    return params.n - 2 * params.m + spec.i + spec.j


def _prefactor(
    spec: BoundSpec, params: DimensionParams, pair: SamplePair
) -> float:
    lam = params.lam
    return min(
        1.0,
        (pair.d_x / pair.sep) ** (lam - spec.i),
        (pair.d_y / pair.sep) ** (lam - spec.j),
    )


def _low_form(exponent: int, pair: SamplePair) -> float:
    ratio = min(pair.sep / pair.d_x, pair.sep / pair.d_y, 1.0)
    return pair.sep ** (-exponent) * ratio**exponent


def _require_separation(pair: SamplePair) -> None:
    if pair.sep <= 0:
        raise ValueError("Error, bounds need distinct points, got sep=0.")


@typechecked
def bound_rhs_green(
    *, spec: BoundSpec, params: DimensionParams, pair: SamplePair
) -> float:
    """Returns the right-hand side of a Green function estimate."""
    validate_spec(spec=spec, params=params)
    if spec.target.is_regular:
        raise ValueError(
            f"Error, {spec.target.value} bounds the regular part, use "
            + "bound_rhs_regular."
        )
    _require_separation(pair)
    exponent = _exponent(spec, params)
    prefactor = _prefactor(spec, params, pair)
    if spec.target == BoundTarget.GREEN_ODD_HIGH:
        return prefactor * pair.sep ** (-exponent)
    low = prefactor * _low_form(exponent, pair)
    if spec.target == BoundTarget.GREEN_ODD_LOW:
        return low
    return low * math.log(1 + min(pair.d_x, pair.d_y) / pair.sep)


@typechecked
def bound_rhs_regular(
    *,
    spec: BoundSpec,
    params: DimensionParams,
    pair: SamplePair,
    diam: float,
    include_log: bool = True,
) -> float:
    """Returns the right-hand side of a regular part estimate.

    :param include_log: Drops the even-dimension logarithm when False.
    """
    validate_spec(spec=spec, params=params)
    if not spec.target.is_regular:
        raise ValueError(
            f"Error, {spec.target.value} bounds the Green function, use "
            + "bound_rhs_green."
        )
    if diam <= 0:
        raise ValueError(f"Error, diameter must be positive, got:{diam}")
    _require_separation(pair)
    exponent = _exponent(spec, params)
    if spec.target == BoundTarget.REGULAR_ODD_HIGH:
        return max(pair.d_x, pair.d_y, pair.sep) ** (-exponent)
    low = _low_form(exponent, pair)
    if spec.target == BoundTarget.REGULAR_ODD_LOW or not include_log:
        return low
    return low * math.log(1 + diam / max(pair.d_x, pair.d_y, pair.sep))


@typechecked
def bound_rhs(
    *,
    spec: BoundSpec,
    params: DimensionParams,
    pair: SamplePair,
    diam: float,
) -> float:
    """Dispatches to the Green or regular part right-hand side."""
    if spec.target.is_regular:
        return bound_rhs_regular(
            spec=spec, params=params, pair=pair, diam=diam
        )
    return bound_rhs_green(spec=spec, params=params, pair=pair)


@typechecked
def assert_split_agreement(
    *,
    spec: BoundSpec,
    params: DimensionParams,
    pair: SamplePair,
    diam: float,
) -> None:
    """At i+j = 2m-n the high and low odd-dimension forms must coincide."""
    if not params.is_odd or spec.i + spec.j != params.homogeneity:
        return
    if spec.target.is_regular:
        high_target, low_target = (
            BoundTarget.REGULAR_ODD_HIGH,
            BoundTarget.REGULAR_ODD_LOW,
        )
    else:
        high_target, low_target = (
            BoundTarget.GREEN_ODD_HIGH,
            BoundTarget.GREEN_ODD_LOW,
        )
    high = bound_rhs(
        spec=BoundSpec(target=high_target, i=spec.i, j=spec.j),
        params=params,
        pair=pair,
        diam=diam,
    )
    low = bound_rhs(
        spec=BoundSpec(target=low_target, i=spec.i, j=spec.j),
        params=params,
        pair=pair,
        diam=diam,
    )
    if abs(high - low) > SPLIT_RTOL * max(abs(high), abs(low)):
        raise ValueError(
            f"Error, high and low forms differ at i+j=2m-n: {high} != {low}"
        )


@typechecked
def log_equivalence_ratio(*, pair: SamplePair, c_prime: float = 1.0) -> float:
    """Returns (C' + log(min d/sep)) / log(1 + min d/sep).

    For close pairs both logarithmic forms are comparable; the ratio stays
    within [1/(1+C'), 1+C'].
    """
    _require_separation(pair)
    scale = min(pair.d_x, pair.d_y) / pair.sep
    return (c_prime + math.log(scale)) / math.log(1 + scale)
