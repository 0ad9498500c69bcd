"""Symbolic kernels of the fundamental solution and their derivatives.

Expressions are built with sympy in the variables z_1..z_n (standing for
x - y) and D (the diameter entering the even-dimension logarithm), then
turned into numpy functions with lambdify. Both steps are cached per
(m, n, multi-index).
"""
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
import sympy as sp
from typeguard import typechecked


@lru_cache(maxsize=None)
def coordinates(n: int) -> Tuple[Tuple[sp.Symbol, ...], sp.Symbol]:
    """Returns the coordinate symbols z_1..z_n and the diameter symbol."""
    z = sp.symbols(f"z1:{n + 1}", real=True)
    diam = sp.Symbol("D", positive=True)
    return tuple(z), diam


@lru_cache(maxsize=None)
def radius(n: int) -> sp.Expr:
    """Returns |z| as an expression."""
    z, _ = coordinates(n)
    return sp.sqrt(sum(zi**2 for zi in z))


@lru_cache(maxsize=None)
def kernel_expression(m: int, n: int) -> sp.Expr:
    """Returns the unnormalised fundamental solution: |z|^(2m-n) for odd n
    and |z|^(2m-n) (log D - log|z|) for even n."""
    _, diam = coordinates(n)
    r = radius(n)
    power = 2 * m - n
    if n % 2 == 1:
        return r**power
    if power == 0:
        return sp.log(diam) - sp.log(r)
    # Expand r^power so that it stays a polynomial under differentiation.
    return sp.expand(r**power) * (sp.log(diam) - sp.log(r))


@lru_cache(maxsize=None)
def derivative_expression(
    m: int, n: int, orders: Tuple[int, ...]
) -> sp.Expr:
    """Returns the partial derivative of the kernel with the given orders."""
    z, _ = coordinates(n)
    expr = kernel_expression(m, n)
    for zi, order in zip(z, orders):
        if order:
            expr = sp.diff(expr, zi, order)
    return expr


@lru_cache(maxsize=None)
def lambdified(expr: sp.Expr, n: int) -> Callable[..., np.ndarray]:
    """Returns a numpy function of (z_1, .., z_n, D) for expr."""
    z, diam = coordinates(n)
    return sp.lambdify((*z, diam), expr, modules="numpy", cse=True)


@typechecked
def evaluate(
    *, expr: sp.Expr, n: int, points: np.ndarray, diam: float
) -> np.ndarray:
    """Evaluates an expression of z and D at every row of points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    func = lambdified(expr, n)
    values = func(*(pts[:, k] for k in range(n)), diam)
    return np.broadcast_to(np.asarray(values, dtype=float), (len(pts),)).copy()
