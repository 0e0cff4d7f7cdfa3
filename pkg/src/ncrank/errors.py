"""Exception hierarchy.  The CLI maps each class to an exit code."""


class NcrankError(Exception):
    exit_code = 1


class ValidationError(NcrankError, ValueError):
    """Malformed input: shapes, unknown vertices, missing instance fields."""

    exit_code = 3


class DimensionError(ValidationError):
    pass


class UnsupportedInstanceError(ValidationError):
    """E.g. a cyclic quiver where path enumeration is required."""


class InvalidSubrepError(ValidationError):
    pass


class ProbabilisticFailure(NcrankError):
    """Randomized search ran out of retries without a certificate.

    ``lower_bound`` is the best certified lower bound on the rank seen so far.
    """

    exit_code = 4

    def __init__(self, message, lower_bound=0):
        super().__init__(message)
        self.lower_bound = lower_bound


class FieldTooSmallError(ProbabilisticFailure):
    pass


class OracleInfeasibleError(NcrankError):
    exit_code = 5


class InternalInvariantError(NcrankError, AssertionError):
    """A proven invariant failed: this is a bug, not bad input."""


class FieldSizeWarning(UserWarning):
    pass
