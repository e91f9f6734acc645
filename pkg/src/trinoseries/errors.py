"""Exception hierarchy shared across the package.

Each class carries a ``module`` attribute naming the subsystem it originates
from; the CLI prepends it to error messages so a failure is attributable.
"""


class TrinoseriesError(Exception):
    module = "trinoseries"


class SingularMatrixError(TrinoseriesError):
    """Determinant is zero where a nonsingular matrix is required."""

    module = "intlinalg"


class SingularKappaError(SingularMatrixError):
    """The selected exponent pairs give det(kappa) = 0; selection rejected."""

    module = "systems"


class ZeroCoordinateError(TrinoseriesError):
    """A coordinate that must be nonzero (x_i, y_i) is zero."""

    module = "systems"


class BranchOutOfRangeError(TrinoseriesError):
    """Branch index outside [0, |det kappa|)."""

    module = "systems"


class PoleError(TrinoseriesError):
    """A genuine (non-removable) gamma pole; the caller must treat the whole
    coefficient via its limit, never this factor alone."""

    module = "gamma"


class DegeneratePairingError(TrinoseriesError):
    """Designated polar families do not intersect transversally."""

    module = "mellinbarnes"


class NonSimplePoleError(TrinoseriesError):
    """A non-designated polar family passes through an enumerated point and its
    gamma does not cancel against a denominator zero."""

    module = "mellinbarnes"

    def __init__(self, message, point=None, k=None):
        super().__init__(message)
        self.point = point
        self.k = k


class PathSingularError(TrinoseriesError):
    """Continuation path passes too close to the discriminant locus."""

    module = "oracle"


class NoConvergenceError(TrinoseriesError):
    module = "oracle"
