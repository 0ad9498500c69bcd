"""Operator order, space dimension and multi-indices."""
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from typeguard import typechecked

from polygreen.exceptions import DimensionOutOfRangeError


class Parity(str, Enum):
    """Parity of the space dimension."""

    ODD = "odd"
    EVEN = "even"


@typechecked
def lambda_order(*, m: int, n: int) -> int:
    """Returns the critical derivative order: m-(n-1)/2 for odd n and
    m-n/2 for even n.

    :param m: Order of the operator (-Delta)^m.
    :param n: Space dimension, 2 <= n <= 2m+1.
    """
    if m < 1:
        raise DimensionOutOfRangeError(
            f"Error, operator order must be positive, got m={m}"
        )
    if n < 2 or n > 2 * m + 1:
        raise DimensionOutOfRangeError(
            f"Error, dimension n={n} is outside the range 2 <= n <= "
            + f"2m+1={2 * m + 1}"
        )
    if n % 2 == 1:
        return m - (n - 1) // 2
    return m - n // 2


@dataclass(frozen=True)
class DimensionParams:
    """The pair (m, n) with its critical order and parity."""

    m: int
    n: int

    def __post_init__(self) -> None:
        lambda_order(m=self.m, n=self.n)

    @property
    def lam(self) -> int:
        """Critical order lambda."""
        return lambda_order(m=self.m, n=self.n)

    @property
    def parity(self) -> Parity:
        """Parity of n."""
        return Parity.ODD if self.n % 2 == 1 else Parity.EVEN

    @property
    def is_odd(self) -> bool:
        """True for odd space dimension."""
        return self.parity == Parity.ODD

    @property
    def homogeneity(self) -> int:
        """Degree 2m-n of the fundamental solution."""
        return 2 * self.m - self.n


@dataclass(frozen=True)
class MultiIndex:
    """A multi-index of length n."""

    components: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.components):
            raise ValueError(
                f"Error, multi-index entries must be >= 0:{self.components}"
            )

    @property
    def order(self) -> int:
        """Sum of the components."""
        return sum(self.components)

    @property
    def n(self) -> int:
        """Length of the multi-index."""
        return len(self.components)

    @staticmethod
    def zero(n: int) -> "MultiIndex":
        """Returns the zero multi-index of length n."""
        return MultiIndex(components=(0,) * n)

    @staticmethod
    def unit(n: int, k: int) -> "MultiIndex":
        """Returns the k-th unit multi-index of length n."""
        return MultiIndex(
            components=tuple(1 if i == k else 0 for i in range(n))
        )

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if self.n != other.n:
            raise ValueError(
                f"Error, lengths differ:{self.components},{other.components}"
            )
        return MultiIndex(
            components=tuple(
                a + b for a, b in zip(self.components, other.components)
            )
        )

    def factorial(self) -> int:
        """Returns the product of the factorials of the components."""
        return math.prod(math.factorial(c) for c in self.components)


@typechecked
def multi_indices(*, n: int, order: int) -> List[MultiIndex]:
    """Returns every multi-index of length n and the given order, in
    lexicographic order."""
    return [
        MultiIndex(components=tuple(combo))
        for combo in itertools.product(range(order + 1), repeat=n)
        if sum(combo) == order
    ]


@typechecked
def multinomial_weight(*, multi: MultiIndex) -> int:
    """Returns |multi|!/multi!, the number of ordered derivatives that
    collapse onto multi."""
    return math.factorial(multi.order) // multi.factorial()
