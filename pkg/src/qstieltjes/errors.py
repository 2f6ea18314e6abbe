"""Exception hierarchy shared by every module."""


class QZetaError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(QZetaError, ValueError):
    """Malformed or out-of-range arguments (wrong sizes, caps exceeded, level mismatch)."""


class DomainError(QZetaError, ValueError):
    """Mathematically invalid input: poles, divergent series, q <= 1 and so on."""


class DivergentSeriesError(DomainError):
    pass


class EvaluationError(QZetaError, ArithmeticError):
    """A numeric evaluation produced a non-finite value or failed to converge."""


class InsufficientPrecisionError(EvaluationError):
    """The working precision cannot certify the requested accuracy."""


class PrecisionFloorError(ArgumentError):
    """A relation search was asked to run below its precision floor."""
