"""Splits y-derivatives of Gamma(x - y) into a logarithmic and a
homogeneous part:

    d_y^alpha Gamma(x - y) = P(x - y) log(D/|x - y|) + Q(x - y),

with P a homogeneous polynomial and Q homogeneous, both of degree
2m - n - |alpha|. P vanishes in odd dimensions.
"""
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from typeguard import typechecked

from polygreen.fundamental.dimension_params import (
    DimensionParams,
    MultiIndex,
)
from polygreen.fundamental.fundamental_solution import cmn_constant
from polygreen.fundamental.symbolic import (
    coordinates,
    derivative_expression,
    evaluate,
    radius,
)


@dataclass(frozen=True)
class SingularDecomposition:
    """The pair (P, Q) of a y-derivative of the fundamental solution.

    p_expr and q_expr are sympy expressions in z = x - y that include the
    constant C_{m,n} and the sign of the y-derivative.
    """

    params: DimensionParams
    alpha: MultiIndex
    p_expr: sp.Expr = field(repr=False)
    q_expr: sp.Expr = field(repr=False)

    @property
    def degree(self) -> int:
        """Homogeneity degree 2m - n - |alpha| of P and Q."""
        return self.params.homogeneity - self.alpha.order

    @property
    def p_is_zero(self) -> bool:
        """True if P is the zero polynomial."""
        return bool(self.p_expr == 0)

    @property
    def p_degree(self) -> int:
        """Total degree of P, -1 for the zero polynomial."""
        if self.p_is_zero:
            return -1
        z, _ = coordinates(self.params.n)
        return int(sp.Poly(sp.expand(self.p_expr), *z).total_degree())

    @typechecked
    def p_alpha(self, *, points: np.ndarray) -> np.ndarray:
        """Returns P at every row of points."""
        return evaluate(
            expr=self.p_expr, n=self.params.n, points=points, diam=1.0
        )

    @typechecked
    def q_alpha(self, *, points: np.ndarray) -> np.ndarray:
        """Returns Q at every row of points."""
        return evaluate(
            expr=self.q_expr, n=self.params.n, points=points, diam=1.0
        )

    @typechecked
    def reconstruct(
        self, *, points: np.ndarray, log_scale: np.ndarray
    ) -> np.ndarray:
        """Returns P log(log_scale/|z|) + Q at every row of points.

        :param log_scale: Length inside the logarithm per row, the diameter
        for the fundamental solution or d(y) for the cut-off copy.
        """
        pts = np.atleast_2d(points)
        q = self.q_alpha(points=pts)
        if self.p_is_zero:
            return q
        r = np.linalg.norm(pts, axis=1)
        return self.p_alpha(points=pts) * np.log(log_scale / r) + q


@typechecked
def decompose_log_polynomial(
    *, params: DimensionParams, alpha: MultiIndex, diam: float = 1.0
) -> SingularDecomposition:
    """Returns the decomposition of d_y^alpha Gamma(x - y).

    P = D dF/dD and Q = F at D = |z|, where F is the derivative as a
    function of z and the diameter symbol D. Neither depends on diam,
    which is accepted for symmetry with the evaluation functions.
    """
    if alpha.order > params.lam:
        raise ValueError(
            f"Error, |alpha|={alpha.order} exceeds the critical order "
            + f"{params.lam} for m={params.m}, n={params.n}"
        )
    if diam <= 0:
        raise ValueError(f"Error, diameter must be positive, got:{diam}")
    _, diam_symbol = coordinates(params.n)
    scale = (-1) ** alpha.order * sp.Float(
        cmn_constant(m=params.m, n=params.n), 17
    )
    full = scale * derivative_expression(
        params.m, params.n, alpha.components
    )
    p_expr = sp.expand(diam_symbol * sp.diff(full, diam_symbol))
    q_expr = full.subs(diam_symbol, radius(params.n))
    if params.is_odd:
        p_expr = sp.Integer(0)
    return SingularDecomposition(
        params=params, alpha=alpha, p_expr=p_expr, q_expr=q_expr
    )
