"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit with 2,
resolution/precondition failures with 3.
"""


class GmtcoverError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GmtcoverError):
    """Invalid run configuration or unparsable spec string."""


class DomainRangeError(GmtcoverError):
    """Argument outside the mathematically valid range."""


class ModulusInvalidError(GmtcoverError):
    """A modulus of continuity is not invertible/monotone on its range."""


class ResolutionError(GmtcoverError):
    """The sampling grid is too coarse for the requested operation."""


class TruncationError(GmtcoverError):
    """A budget was exceeded; carries the partial result when available."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NumericError(GmtcoverError):
    """Numerical routine failed to converge; carries the partial value."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CoverInvalidError(GmtcoverError):
    """A (weighted) cover fails to cover the target set."""

    def __init__(self, message, point=None, deficit=None):
        super().__init__(message)
        self.point = point
        self.deficit = deficit


class TreeInvalidError(GmtcoverError):
    """A mass-distribution tree violates nesting or mass conservation."""


class PreconditionError(GmtcoverError):
    """An operation was called outside its stated precondition."""


class InternalInconsistencyError(GmtcoverError):
    """An invariant that should hold by construction was violated."""
