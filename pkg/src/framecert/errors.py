"""Exception hierarchy shared by every framecert module."""


class FramecertError(Exception):
    """Base class for all errors raised by framecert."""


class DimensionMismatch(FramecertError, ValueError):
    pass


class UnsupportedField(FramecertError, TypeError):
    pass


class ExactOverflow(FramecertError, ArithmeticError):
    """Raised when exact elimination exceeds the intermediate bit-length cap."""


class SingularMatrix(FramecertError, ArithmeticError):
    pass


class SingularGram(SingularMatrix):
    pass


class NotSymmetric(FramecertError, ValueError):
    pass


class NotPositiveDefinite(FramecertError, ValueError):
    pass


class NotAFrame(FramecertError, ValueError):
    pass


class NotParseval(FramecertError, ValueError):
    pass


class NoComplement(FramecertError, ValueError):
    pass


class TooLarge(FramecertError, ValueError):
    """Raised when subset enumeration would exceed the configured guard."""


class TooFewVectors(FramecertError, ValueError):
    pass


class ZeroSubspace(FramecertError, ValueError):
    pass


class ZeroVector(FramecertError, ValueError):
    pass


class NotAProjectionTarget(FramecertError, ValueError):
    pass


class PreconditionViolated(FramecertError, ValueError):
    pass


class NotAViolation(FramecertError, ValueError):
    pass


class BadCoefficients(FramecertError, ValueError):
    pass


class RangeError(FramecertError, ValueError):
    pass


class ResampleExhausted(FramecertError, RuntimeError):
    pass


class UnknownExample(FramecertError, KeyError):
    pass


class InputFormatError(FramecertError, ValueError):
    """Malformed frame, subspace or certificate file."""
