"""Exception types raised by dnhirota."""


class DnHirotaError(Exception):
    """Base class for all package errors."""


class RankTooSmallError(DnHirotaError, ValueError):
    """The rank n is below the supported minimum of 3."""


class DimensionMismatchError(DnHirotaError, ValueError):
    pass


class SingularSystemError(DnHirotaError, RuntimeError):
    """A linear system that should have a unique solution did not."""


class ComponentRangeError(DnHirotaError, ValueError):
    pass


class ProportionalityError(DnHirotaError, RuntimeError):
    """A commutator was expected to be a scalar multiple of a basis element but is not."""


class InvalidTagError(DnHirotaError, ValueError):
    pass


class TruncationMismatchError(DnHirotaError, ValueError):
    """Two series live in incompatible truncated spaces."""


class WindowOverflowError(DnHirotaError, ValueError):
    """A Laurent degree fell outside the configured z-window."""


class UnknownGeneratorError(DnHirotaError, ValueError):
    pass
