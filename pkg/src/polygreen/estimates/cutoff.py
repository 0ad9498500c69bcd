"""Smooth radial cut-off equal to 1 on B_{1/4} and 0 outside B_{1/2}, and
a small symbolic calculus for products of the cut-off with kernels.

The cut-off is eta(z) = b(|z|^2/d^2) for a length scale d with

    b(s) = g(1/4 - s) / (g(1/4 - s) + g(s - 1/16)),  g(t) = exp(-1/t),

so b = 1 for s <= 1/16 and b = 0 for s >= 1/4. Derivatives of expressions
containing eta are taken symbolically with placeholders h_j = b^(j)(s):
d/dz_k h_j = h_(j+1) * 2 z_k / d^2.
"""
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
import sympy as sp
from typeguard import typechecked

from polygreen.fundamental.dimension_params import MultiIndex
from polygreen.fundamental.symbolic import coordinates

PLATEAU = sp.Rational(1, 16)
SUPPORT = sp.Rational(1, 4)


@lru_cache(maxsize=None)
def _profile_symbol() -> sp.Symbol:
    return sp.Symbol("s", positive=True)


@lru_cache(maxsize=None)
def profile_expression() -> sp.Expr:
    """Returns b(s) on the open band 1/16 < s < 1/4."""
    s = _profile_symbol()
    inner = sp.exp(-1 / (SUPPORT - s))
    outer = sp.exp(-1 / (s - PLATEAU))
    return inner / (inner + outer)


@lru_cache(maxsize=None)
def _profile_derivative(order: int) -> Callable[[np.ndarray], np.ndarray]:
    s = _profile_symbol()
    return sp.lambdify(
        s, sp.diff(profile_expression(), s, order), modules="numpy", cse=True
    )


@lru_cache(maxsize=None)
def placeholders(order: int) -> Tuple[sp.Symbol, ...]:
    """Returns the symbols h_0..h_order standing for b^(j)(s)."""
    return tuple(sp.symbols(f"h0:{order + 1}", real=True))


@lru_cache(maxsize=None)
def scale_symbol() -> sp.Symbol:
    """Returns the symbol d for the cut-off length scale."""
    return sp.Symbol("d", positive=True)


class CutoffFunction:
    """The cut-off eta with derivatives of the profile up to max_order.

    derivative_bounds[j] is the supremum of |b^(j)| over the band.
    """

    @typechecked
    def __init__(self, *, max_order: int) -> None:
        self.max_order = max_order
        band = np.linspace(1 / 16, 1 / 4, 4003)[1:-1]
        self.derivative_bounds: Tuple[float, ...] = tuple(
            float(np.max(np.abs(self._raw(order, band))))
            for order in range(max_order + 1)
        )

    @staticmethod
    def _raw(order: int, s: np.ndarray) -> np.ndarray:
        values = _profile_derivative(order)(s)
        return np.broadcast_to(np.asarray(values, dtype=float), s.shape)

    @typechecked
    def profile_derivatives(self, *, s: np.ndarray) -> np.ndarray:
        """Returns b^(j)(s) for j = 0..max_order, shape (max_order+1, N)."""
        s = np.asarray(s, dtype=float)
        out = np.zeros((self.max_order + 1, s.size))
        out[0, s <= 1 / 16] = 1.0
        band = (s > 1 / 16) & (s < 1 / 4)
        if np.any(band):
            with np.errstate(over="ignore", invalid="ignore"):
                for order in range(self.max_order + 1):
                    out[order, band] = self._raw(order, s[band])
        return np.nan_to_num(out, nan=0.0)

    @typechecked
    def eta(self, *, points: np.ndarray, scale: float) -> np.ndarray:
        """Returns eta(z/scale) at rows of points z."""
        s = np.sum(np.atleast_2d(points) ** 2, axis=1) / scale**2
        return self.profile_derivatives(s=s)[0]

    @typechecked
    def band_mask(self, *, points: np.ndarray, scale: float) -> np.ndarray:
        """Returns True on the closed annulus scale/4 <= |z| <= scale/2."""
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        return (r >= scale / 4) & (r <= scale / 2)


class CutoffCalculus:
    """Derivatives of expressions in z, d and h_0..h_order.

    :param n: Space dimension.
    :param order: Highest placeholder index available.
    """

    @typechecked
    def __init__(self, *, n: int, order: int) -> None:
        self.n = n
        self.order = order
        self.z, _ = coordinates(n)
        self.d = scale_symbol()
        self.h = placeholders(order)

    def partial(self, expr: sp.Expr, k: int) -> sp.Expr:
        """Returns d/dz_k of expr, chaining through the placeholders."""
        result = sp.diff(expr, self.z[k])
        chain = 2 * self.z[k] / self.d**2
        for j, symbol in enumerate(self.h):
            if not expr.has(symbol):
                continue
            if j == self.order:
                raise ValueError(
                    f"Error, placeholder h{j} cannot be differentiated, "
                    + "raise the calculus order."
                )
            result += sp.diff(expr, symbol) * self.h[j + 1] * chain
        return result

    def derivative(self, expr: sp.Expr, multi: MultiIndex) -> sp.Expr:
        """Returns d^multi of expr."""
        for k, count in enumerate(multi.components):
            for _ in range(count):
                expr = self.partial(expr, k)
        return expr

    def laplacian(self, expr: sp.Expr) -> sp.Expr:
        """Returns the Laplacian of expr in z."""
        return sum(
            (self.partial(self.partial(expr, k), k) for k in range(self.n)),
            sp.Integer(0),
        )

    def lambdify(self, expr: sp.Expr) -> Callable[..., np.ndarray]:
        """Returns a numpy function of (z_1..z_n, d, h_0..h_order, D), D
        being the diameter symbol of the fundamental solution."""
        _, diam = coordinates(self.n)
        return sp.lambdify(
            (*self.z, self.d, *self.h, diam), expr, modules="numpy", cse=True
        )

    @typechecked
    def evaluate(
        self,
        *,
        funcs: Sequence[Callable[..., np.ndarray]],
        cutoff: CutoffFunction,
        points: np.ndarray,
        scale: float,
        diam: float,
    ) -> List[np.ndarray]:
        """Evaluates lambdified expressions at rows of points z.

        :param diam: Value substituted for the diameter symbol D, if any.
        """
        if cutoff.max_order < self.order:
            raise ValueError(
                f"Error, cut-off carries {cutoff.max_order} profile "
                + f"derivatives, {self.order} are needed."
            )
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        s = np.sum(pts**2, axis=1) / scale**2
        profile = cutoff.profile_derivatives(s=s)[: self.order + 1]
        args = [pts[:, k] for k in range(self.n)]
        results = []
        with np.errstate(divide="ignore", invalid="ignore"):
            for func in funcs:
                values = func(*args, scale, *profile, diam)
                results.append(
                    np.broadcast_to(
                        np.asarray(values, dtype=float), (len(pts),)
                    ).copy()
                )
        return results

