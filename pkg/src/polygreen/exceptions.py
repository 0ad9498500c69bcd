"""Error types raised by polygreen.

Every error subclasses a builtin exception so callers that only expect
ValueError or RuntimeError keep working.
"""


class DimensionOutOfRangeError(ValueError):
    """Raised when (m, n) lies outside 2 <= n <= 2m+1."""


class PointOutsideDomainError(ValueError):
    """Raised when a point fails the membership test of a domain."""


class SingularPointError(ValueError):
    """Raised when a singular kernel is evaluated at its pole."""


class CoincidentPointsError(ValueError):
    """Raised when a two-point kernel is evaluated at x = y."""


class TooCloseToBoundaryError(ValueError):
    """Raised when a point is too close to the boundary for the stencils."""


class GridTooCoarseError(ValueError):
    """Raised when a grid does not resolve its domain."""


class FactorizationFailedError(RuntimeError):
    """Raised when the sparse factorisation is singular or indefinite."""


class SolverDivergedError(RuntimeError):
    """Raised when a linear solve misses its residual tolerance."""


class SpecMismatchError(ValueError):
    """Raised when a bound specification does not fit (m, n)."""


class InvalidParityError(ValueError):
    """Raised when an odd-dimension construction gets an even dimension."""


class ZeroFieldError(ValueError):
    """Raised when a ratio of norms is undefined for a zero field."""


class GeometryInfeasibleError(ValueError):
    """Raised when a source cannot be placed as a decay check requires."""


class EmptyInputError(ValueError):
    """Raised when a reduction receives no records."""


class ConfigError(ValueError):
    """Raised when a run configuration is invalid.

    :param field_path: Dotted path of the offending field, e.g.
    config.bound_specs[1].i
    """

    def __init__(self, field_path: str, message: str) -> None:
        self.field_path = field_path
        super().__init__(f"Error, {field_path}: {message}")


class RegionUnreachableWarning(UserWarning):
    """Emitted when a sampling region receives fewer pairs than its quota."""
