"""Exception hierarchy for parameter, orientation, and evaluation failures."""


class SsflowError(ValueError):
    """Base class for all domain and parameter violations in this package."""


class DomainError(SsflowError):
    """An argument lies outside the mathematical domain of the operation."""


class DegenerateError(SsflowError):
    """A parameter combination collapses a required denominator or branch."""


class DimensionTwoError(DomainError):
    """The dimension-change maps are undefined at n = 2 (both branches give n' = 0)."""


class CriticalError(SsflowError):
    """Operation refused because the parameters sit at the critical exponent (b = 0)."""


class UnphysicalDimensionError(SsflowError):
    """A dimension-change map produced a non-positive target dimension.

    The offending value is kept in ``n_prime`` so callers that only need the
    raw number can still read it.
    """

    def __init__(self, message, n_prime):
        super().__init__(message)
        self.n_prime = n_prime


class OrientationError(SsflowError):
    """A p-Laplacian phase state violates the X > 0 orientation assumption."""


class SingularEvaluationError(SsflowError):
    """Evaluation hit a singular point, e.g. |0| to a negative power or f' = 0."""


class OutsideSupportError(SsflowError):
    """A profile was evaluated outside the open set where it is positive."""


class AnchorMismatchError(SsflowError):
    """The anchor sample is inconsistent with the first trajectory state."""


class ComparisonError(SsflowError):
    """Trajectories cannot be compared (no overlapping range)."""


class IntegrationFailure(RuntimeError):
    """The integrator hit non-finite values; carries the partial trajectory."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationWarning(UserWarning):
    """Profile reconstruction stopped early (state left the admissible region)."""
