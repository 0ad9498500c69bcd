import numpy as np
import pytest

from polygreen.estimates.cutoff import CutoffFunction
from polygreen.exceptions import DimensionOutOfRangeError, InvalidParityError
from polygreen.fundamental.fundamental_solution import cmn_constant
from polygreen.geometry.sampling import sphere_points
from polygreen.harness.verify_counterexample import (
    counterexample_params,
    gradient_tensor,
    source_support,
    verify_counterexample,
)


def test_even_dimension_has_no_counterexample():
    with pytest.raises(InvalidParityError):
        counterexample_params(m=2, n=2)


def test_lambda_zero_has_no_counterexample():
    with pytest.raises(DimensionOutOfRangeError):
        counterexample_params(m=1, n=3)


def test_params_of_the_biharmonic_example():
    params = counterexample_params(m=2, n=3)
    assert params.lam == 1


def test_gradient_is_bounded_without_a_limit():
    params = counterexample_params(m=2, n=3)
    cutoff = CutoffFunction(max_order=4)
    points = 1e-3 * sphere_points(n=3, count=50)
    tensor = gradient_tensor(
        params=params, order=1, points=points, cutoff=cutoff
    )
    norms = np.linalg.norm(tensor, axis=1)
    assert np.allclose(norms, abs(cmn_constant(m=2, n=3)), rtol=1e-9)
    axis = np.array([[1e-3, 0.0, 0.0], [-1e-3, 0.0, 0.0]])
    rays = gradient_tensor(params=params, order=1, points=axis, cutoff=cutoff)
    assert np.allclose(rays[0], -rays[1])


def test_source_lives_in_the_cutoff_band():
    params = counterexample_params(m=2, n=3)
    support = source_support(
        params=params, cutoff=CutoffFunction(max_order=4)
    )
    assert support["band"] > 0
    assert support["inner"] <= 1e-8 * support["band"]
    assert support["outer"] <= 1e-8 * support["band"]


@pytest.mark.slow
def test_biharmonic_counterexample():
    report = verify_counterexample(m=2, n=3, grid_levels=[1 / 8, 1 / 16])
    assert report.verdicts["bounded"]
    assert report.verdicts["unbounded"]
    assert report.verdicts["no_limit"]
    assert report.verdicts["source_support"]
    assert report.verdicts["energy_stable"]
    assert -1.2 <= report.measurements["growth_exponent"] <= -0.8
