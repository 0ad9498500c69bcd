import pytest

from polygreen.exceptions import DimensionOutOfRangeError
from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
    Parity,
    lambda_order,
    multi_indices,
    multinomial_weight,
)


@pytest.mark.parametrize(
    "m,n,expected", [(1, 3, 0), (2, 2, 1), (2, 3, 1), (3, 5, 1), (3, 2, 2)]
)
def test_lambda_order(m, n, expected):
    assert lambda_order(m=m, n=n) == expected


@pytest.mark.parametrize("m,n", [(1, 4), (2, 6), (1, 1), (0, 2)])
def test_dimension_out_of_range(m, n):
    with pytest.raises(DimensionOutOfRangeError):
        DimensionParams(m=m, n=n)


def test_parity_and_homogeneity():
    params = DimensionParams(m=2, n=3)
    assert params.parity == Parity.ODD
    assert params.is_odd
    assert params.homogeneity == 1
    assert not DimensionParams(m=2, n=2).is_odd


def test_multi_index_arithmetic():
    alpha = MultiIndex.unit(3, 0) + MultiIndex.unit(3, 2)
    assert alpha.components == (1, 0, 1)
    assert alpha.order == 2
    assert MultiIndex.zero(2).order == 0
    with pytest.raises(ValueError):
        MultiIndex(components=(1, -1))
    with pytest.raises(ValueError):
        MultiIndex.zero(2) + MultiIndex.zero(3)


def test_multi_indices_and_weights():
    indices = multi_indices(n=3, order=2)
    assert len(indices) == 6
    # sum of i!/beta! over |beta| = i equals n^i
    assert sum(multinomial_weight(multi=b) for b in indices) == 9
    assert multinomial_weight(multi=MultiIndex(components=(1, 1))) == 2
