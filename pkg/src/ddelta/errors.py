"""Exception hierarchy shared by all ddelta modules.

Every error carries a distinct CLI exit code so scripted callers can
tell failure modes apart without parsing stderr.
"""

from __future__ import annotations


class DDeltaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ParseError(DDeltaError):
    """Operator expression rejected by the grammar.

    `position` is the 0-based offset into the source text.
    """

    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NotEntireError(DDeltaError):
    """num*/den does not extend to an entire function."""

    exit_code = 3

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DivisionByZeroError(DDeltaError):
    exit_code = 4


class BothZeroError(DDeltaError):
    exit_code = 5


class DimensionMismatchError(DDeltaError):
    exit_code = 6


class BoundaryZeroError(DDeltaError):
    """A characteristic zero sits on (or hugs) the requested contour."""

    exit_code = 7

    def __init__(self, message, suggested_rect=None):
        super().__init__(message)
        self.suggested_rect = suggested_rect


class NonConvergenceError(DDeltaError):
    exit_code = 8


class ResonantDenominatorError(DDeltaError):
    """phi(alpha) = 0 for a mode alpha: the denominator action is ill posed."""

    exit_code = 9


class NotRetardedError(DDeltaError):
    exit_code = 10


class IllConditionedError(DDeltaError):
    """Raised only on request: spectral projection reports, not fails."""

    exit_code = 11


class QuadratureDivergenceError(DDeltaError):
    exit_code = 12


class TruncationTooShortError(DDeltaError):
    exit_code = 13


class DuplicateNodeError(DDeltaError):
    exit_code = 14


class EnvelopeCapExceededError(DDeltaError):
    exit_code = 15


class SchemaViolationError(DDeltaError):
    """JSON payload does not match the documented schema.

    `path` names the offending JSON location, e.g. "terms[2].poly".
    """

    exit_code = 16

    def __init__(self, message, path=""):
        super().__init__(f"{message} (at {path})" if path else message)
        self.path = path


class EnvelopeViolationError(DDeltaError):
    """A certified growth envelope failed to dominate its samples."""

    exit_code = 17


class NonPolynomialDenominatorError(ParseError):
    exit_code = 18


class BezoutUnresolvedError(DDeltaError):
    """The Bezout construction could not produce a verified identity."""

    exit_code = 19


class EvalOverflowError(DDeltaError):
    """|Re z| * max sigma exponent exceeds the floating point range."""

    exit_code = 20
