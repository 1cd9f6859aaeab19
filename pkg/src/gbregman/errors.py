"""Exception hierarchy shared by every module."""


class GBregmanError(Exception):
    """Base class for all library errors."""


class DomainError(GBregmanError, ValueError):
    """A value lies outside the domain of a point, link or generator."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimensionMismatchError(DomainError):
    """Two operands have incompatible dimensions."""


class LengthMismatchError(GBregmanError, ValueError):
    """Point and weight sequences have different lengths."""


class UnsupportedError(GBregmanError):
    """The operation needs a capability (e.g. a conjugate) the generator lacks."""


class UnknownKeyError(GBregmanError, KeyError):
    """No catalog entry is registered under the requested key."""


class ConvexityViolation(GBregmanError, ArithmeticError):
    """A divergence came out negative beyond the roundoff floor."""


class ResampleExhausted(GBregmanError, RuntimeError):
    """Rejection sampling failed to produce a point inside the domain."""


class ClusterSizeError(GBregmanError, ValueError):
    """More clusters were requested than there are data points."""
