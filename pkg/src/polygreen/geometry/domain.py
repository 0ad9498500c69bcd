"""Bounded domains with analytic boundary distances.

A domain exposes a signed distance that is positive exactly on its
interior, so membership and boundary distance share one code path. The
punctured ball treats its puncture as a boundary point of zero radius.
"""
import math
from enum import Enum
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq
from typeguard import typechecked

from polygreen.exceptions import PointOutsideDomainError


class DomainKind(str, Enum):
    """Shapes supported by Domain, keyed by their configuration name."""

    UNIT_BALL = "unit-ball"
    PUNCTURED_BALL = "punctured-ball"
    ANNULUS = "annulus"
    ELLIPSE = "ellipse"
    RECTANGLE = "rectangle"
    L_SHAPE = "l-shape"


# Number of shape parameters per kind, None means one per dimension.
_SHAPE_SIZES = {
    DomainKind.UNIT_BALL: 0,
    DomainKind.PUNCTURED_BALL: 1,
    DomainKind.ANNULUS: 2,
    DomainKind.ELLIPSE: 2,
    DomainKind.RECTANGLE: None,
    DomainKind.L_SHAPE: 2,
}


class Domain:
    """Bounded open set of R^n described by a kind and shape parameters.

    Shape parameters per kind:
        unit-ball: ()
        punctured-ball: (epsilon,), the removed closed ball radius, >= 0
        annulus: (r_in, r_out)
        ellipse: (a, b) semi-axes, centred at the origin, n = 2
        rectangle: (L_1, ..., L_n), the box [0, L_1] x ... x [0, L_n]
        l-shape: (a, b), [0,a]x[0,b] minus [a/2,a]x[b/2,b], n = 2
    """

    @typechecked
    def __init__(
        self, *, kind: DomainKind, n: int, shape: Tuple[float, ...] = ()
    ) -> None:
        self.kind = kind
        self.n = n
        self.shape = tuple(float(s) for s in shape)
        self._verify()

    def _verify(self) -> None:
        if self.n < 2:
            raise ValueError(f"Error, dimension must be >= 2, got:{self.n}")
        expected = _SHAPE_SIZES[self.kind]
        if expected is None:
            expected = self.n
        if len(self.shape) != expected:
            raise ValueError(
                f"Error, {self.kind.value} expects {expected} shape "
                + f"parameters, got:{self.shape}"
            )
        if self.kind in (DomainKind.ELLIPSE, DomainKind.L_SHAPE):
            if self.n != 2:
                raise ValueError(
                    f"Error, {self.kind.value} is planar, got n={self.n}"
                )
        if self.kind == DomainKind.PUNCTURED_BALL:
            if not 0 <= self.shape[0] < 1:
                raise ValueError(
                    f"Error, puncture radius must be in [0,1):{self.shape}"
                )
        elif self.kind == DomainKind.ANNULUS:
            if not 0 <= self.shape[0] < self.shape[1]:
                raise ValueError(
                    f"Error, annulus needs 0<=r_in<r_out, got:{self.shape}"
                )
        elif any(s <= 0 for s in self.shape):
            raise ValueError(
                f"Error, shape parameters must be positive:{self.shape}"
            )

    def __repr__(self) -> str:
        return f"Domain({self.kind.value}, n={self.n}, shape={self.shape})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return (self.kind, self.n, self.shape) == (
            other.kind,
            other.n,
            other.shape,
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.n, self.shape))

    @property
    def diameter(self) -> float:
        """Returns the diameter of the domain."""
        if self.kind in (DomainKind.UNIT_BALL, DomainKind.PUNCTURED_BALL):
            return 2.0
        if self.kind == DomainKind.ANNULUS:
            return 2.0 * self.shape[1]
        if self.kind == DomainKind.ELLIPSE:
            return 2.0 * max(self.shape)
        return float(math.sqrt(sum(s**2 for s in self.shape)))

    @property
    def narrowest_width(self) -> float:
        """Returns the width of the thinnest feature a grid must resolve."""
        if self.kind == DomainKind.UNIT_BALL:
            return 2.0
        if self.kind == DomainKind.PUNCTURED_BALL:
            return 1.0 - self.shape[0]
        if self.kind == DomainKind.ANNULUS:
            return self.shape[1] - self.shape[0]
        if self.kind == DomainKind.ELLIPSE:
            return 2.0 * min(self.shape)
        if self.kind == DomainKind.RECTANGLE:
            return min(self.shape)
        return min(self.shape) / 2.0

    @typechecked
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the lower and upper corner of an enclosing box."""
        if self.kind in (
            DomainKind.UNIT_BALL,
            DomainKind.PUNCTURED_BALL,
            DomainKind.ANNULUS,
        ):
            radius = 1.0 if self.kind != DomainKind.ANNULUS else self.shape[1]
            return -radius * np.ones(self.n), radius * np.ones(self.n)
        if self.kind == DomainKind.ELLIPSE:
            semi = np.array(self.shape)
            return -semi, semi
        return np.zeros(self.n), np.array(self.shape)

    @typechecked
    def signed_distance(self, *, points: np.ndarray) -> np.ndarray:
        """Returns the distance to the boundary for every row of points.

        The value is positive exactly for members of the domain and
        non-positive outside. Outside the domain only the sign is
        meaningful for the punctured and l-shaped kinds.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind in (
            DomainKind.UNIT_BALL,
            DomainKind.PUNCTURED_BALL,
            DomainKind.ANNULUS,
        ):
            r = np.linalg.norm(pts, axis=1)
            if self.kind == DomainKind.UNIT_BALL:
                return 1.0 - r
            if self.kind == DomainKind.PUNCTURED_BALL:
                return np.minimum(1.0 - r, r - self.shape[0])
            return np.minimum(self.shape[1] - r, r - self.shape[0])
        if self.kind == DomainKind.RECTANGLE:
            sides = np.array(self.shape)
            return np.min(np.minimum(pts, sides - pts), axis=1)
        if self.kind == DomainKind.ELLIPSE:
            inside = (pts[:, 0] / self.shape[0]) ** 2 + (
                pts[:, 1] / self.shape[1]
            ) ** 2 < 1.0
            dist = np.array(
                [
                    float(np.linalg.norm(p - _ellipse_nearest(p, self.shape)))
                    for p in pts
                ]
            )
            return np.where(inside, dist, -dist)
        inside = _l_shape_contains(pts, self.shape)
        dist, _ = _segments_nearest(pts, _l_shape_segments(self.shape))
        return np.where(inside, dist, -dist)

    @typechecked
    def contains(self, *, x: np.ndarray) -> bool:
        """Returns True if x is a member of the domain."""
        return bool(self.signed_distance(points=x)[0] > 0)

    @typechecked
    def distance_to_boundary(self, *, x: np.ndarray) -> float:
        """Returns the distance from an interior point x to the boundary.

        :param x: A point of the domain.
        """
        dist = float(self.signed_distance(points=x)[0])
        if dist <= 0:
            raise PointOutsideDomainError(
                f"Error, point:{x} is not inside {self}."
            )
        return dist

    @typechecked
    def nearest_boundary_point(self, *, x: np.ndarray) -> np.ndarray:
        """Returns a boundary point at distance d(x) from x."""
        x = np.asarray(x, dtype=float)
        if self.kind in (
            DomainKind.UNIT_BALL,
            DomainKind.PUNCTURED_BALL,
            DomainKind.ANNULUS,
        ):
            r = float(np.linalg.norm(x))
            direction = x / r if r > 0 else np.eye(self.n)[0]
            r_out = self.shape[1] if self.kind == DomainKind.ANNULUS else 1.0
            r_in = 0.0 if self.kind == DomainKind.UNIT_BALL else self.shape[0]
            if self.kind != DomainKind.UNIT_BALL and r - r_in < r_out - r:
                return r_in * direction
            return r_out * direction
        if self.kind == DomainKind.RECTANGLE:
            sides = np.array(self.shape)
            gaps = np.concatenate([x, sides - x])
            k = int(np.argmin(gaps))
            nearest = x.copy()
            nearest[k % self.n] = 0.0 if k < self.n else sides[k - self.n]
            return nearest
        if self.kind == DomainKind.ELLIPSE:
            return _ellipse_nearest(x, self.shape)
        _, nearest = _segments_nearest(
            np.atleast_2d(x), _l_shape_segments(self.shape)
        )
        return nearest[0]

    @typechecked
    def sample_interior_point(self, *, rng: np.random.Generator) -> np.ndarray:
        """Returns a uniformly distributed interior point by rejection."""
        low, high = self.bounding_box()
        while True:
            candidate = rng.uniform(low, high)
            if self.contains(x=candidate):
                return candidate

    @typechecked
    def sample_boundary_point(
        self, *, rng: np.random.Generator
    ) -> np.ndarray:
        """Returns the nearest boundary point of a random interior point."""
        return self.nearest_boundary_point(
            x=self.sample_interior_point(rng=rng)
        )

    @typechecked
    def exterior_point(
        self, *, x: np.ndarray, offset: float = 1e-3
    ) -> np.ndarray:
        """Returns the point at distance offset outside the boundary, along
        the outward normal at the nearest boundary point of x."""
        boundary = self.nearest_boundary_point(x=x)
        normal = boundary - np.asarray(x, dtype=float)
        return boundary + offset * normal / np.linalg.norm(normal)


def _ellipse_nearest(p: np.ndarray, semi: Tuple[float, ...]) -> np.ndarray:
    """Returns the point of the ellipse curve closest to p.

    Reduces to the first quadrant with the major axis along the first
    coordinate, then solves for the Lagrange multiplier t of
    (a x0/(t+a^2))^2 + (b y0/(t+b^2))^2 = 1.
    """
    swap = semi[0] < semi[1]
    a, b = (semi[1], semi[0]) if swap else (semi[0], semi[1])
    signs = np.where(np.asarray(p) < 0, -1.0, 1.0)
    q = np.abs(np.asarray(p, dtype=float))
    x0, y0 = (q[1], q[0]) if swap else (q[0], q[1])

    if y0 > 0 and x0 > 0:

        def lagrange(t: float) -> float:
            first = a * x0 / (t + a * a)
            second = b * y0 / (t + b * b)
            return first**2 + second**2 - 1

        low = -b * b + b * y0
        high = -b * b + math.sqrt(a * a * x0 * x0 + b * b * y0 * y0)
        if high - low <= 0 or lagrange(high) == 0:
            t = high
        else:
            t = brentq(lagrange, low, high, xtol=1e-15, rtol=1e-15)
        x, y = a * a * x0 / (t + a * a), b * b * y0 / (t + b * b)
    elif y0 > 0:
        x, y = 0.0, b
    elif a > b and x0 < (a * a - b * b) / a:
        x = a * a * x0 / (a * a - b * b)
        y = b * math.sqrt(max(0.0, 1 - (x / a) ** 2))
    else:
        x, y = a, 0.0

    nearest = np.array([y, x]) if swap else np.array([x, y])
    return nearest * signs


@typechecked
def _l_shape_segments(
    arms: Tuple[float, ...]
) -> List[Tuple[np.ndarray, np.ndarray]]:
    a, b = arms
    corners = [
        (0.0, 0.0),
        (a, 0.0),
        (a, b / 2),
        (a / 2, b / 2),
        (a / 2, b),
        (0.0, b),
    ]
    return [
        (np.array(corners[k]), np.array(corners[(k + 1) % len(corners)]))
        for k in range(len(corners))
    ]


def _l_shape_contains(pts: np.ndarray, arms: Tuple[float, ...]) -> np.ndarray:
    a, b = arms
    in_box = (
        (pts[:, 0] > 0) & (pts[:, 0] < a) & (pts[:, 1] > 0) & (pts[:, 1] < b)
    )
    in_notch = (pts[:, 0] >= a / 2) & (pts[:, 1] >= b / 2)
    return in_box & ~in_notch


def _segments_nearest(
    pts: np.ndarray, segments: List[Tuple[np.ndarray, np.ndarray]]
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the distance to and nearest point on a polyline."""
    best = np.full(len(pts), np.inf)
    nearest = np.zeros_like(pts)
    for start, end in segments:
        edge = end - start
        t = np.clip((pts - start) @ edge / float(edge @ edge), 0.0, 1.0)
        foot = start + t[:, None] * edge
        dist = np.linalg.norm(pts - foot, axis=1)
        closer = dist < best
        best = np.where(closer, dist, best)
        nearest[closer] = foot[closer]
    return best, nearest
