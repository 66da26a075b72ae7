"""Exception hierarchy shared by every module."""


class BCCError(ValueError):
    """Base class for invalid inputs to bcclab operations."""


class NegativeEntry(BCCError):
    pass


class RowSumViolation(BCCError):
    pass


class SizeExceeded(BCCError):
    """A multi-letter object would exceed the configured memory budget."""


class DimensionMismatch(BCCError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class LengthMismatch(DimensionMismatch):
    pass


class AxisCountMismatch(DimensionMismatch):
    pass


class EmptySet(BCCError):
    pass


class DomainError(BCCError):
    pass


class PreconditionViolated(BCCError):
    pass
