"""Exception types shared across the package."""


class EntOrderError(Exception):
    """Base class for all package errors."""


class ValidationError(EntOrderError):
    """A spectrum or report failed structural validation."""


class NonPositive(ValidationError):
    """A Schmidt weight is zero or negative."""


class NotSorted(ValidationError):
    """Weights are not nonincreasing and strict ordering was requested."""


class NotNormalized(ValidationError):
    """Weights (plus any certified tail) do not sum to one."""


class ParseError(EntOrderError):
    """A spectrum file could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QOutOfRange(EntOrderError):
    """Squeezing parameter outside [0, 1)."""


class DomainError(EntOrderError):
    """Evaluation point outside the domain of the oscillator profile (x <= 1)."""


class NonPositiveP(EntOrderError):
    """Oscillator profile is not strictly positive at an evaluation point."""


class OffsetNotFound(EntOrderError):
    """No shift up to the configured maximum satisfies the curve conditions."""


class ConditionViolated(EntOrderError):
    """Curve conditions fail inside the requested discretization range."""


class TruncationUnsafe(EntOrderError):
    """A truncation tail is large enough to contaminate a requested comparison."""


class TooShort(EntOrderError):
    """A sequence is shorter than the minimum the classifier needs."""


class WindowTooSmall(EntOrderError):
    """A comparison window holds fewer points than the configured minimum."""


class InvalidFamily(EntOrderError):
    """A sampled reference-family member fails the tail-function conditions."""
