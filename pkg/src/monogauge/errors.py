"""Exception hierarchy shared by all monogauge modules."""

from __future__ import annotations


class MonogaugeError(Exception):
    """Base class for every error raised by the package."""


class OrderMismatch(MonogaugeError):
    """Two cyclotomic elements of different orders were combined."""


class DivisionByZeroError(MonogaugeError, ZeroDivisionError):
    """Inversion of the zero element."""


class NonIntegral(MonogaugeError):
    """A Milnor-number product did not evaluate to an integer."""


class Unsupported(MonogaugeError):
    """The requested invariant is not available for this singularity kind."""


class OutOfRange(MonogaugeError):
    """Family parameters outside the admissible range."""


class ParseError(MonogaugeError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InvariantViolation(MonogaugeError):
    """A claimed profile breaks the pair-count identity (or a similar check)."""


class ChartHitsSingularity(MonogaugeError):
    """A singular point lies on the hyperplane removed by the affine chart."""


class DuplicatePoint(MonogaugeError):
    pass


class MissingCoordinates(MonogaugeError):
    """The oracle was requested but the profile carries no point coordinates."""


class Unresolved(MonogaugeError):
    """No known characteristic polynomial for this family."""


class NonPolynomial(MonogaugeError):
    pass


class SoundnessViolation(MonogaugeError):
    """A rule asserts an eigenvalue that the engine excluded. Always a bug."""


class LemmaCounterexample(MonogaugeError):
    """The fat-point evaluation map failed to be surjective at N = sum(a) - 1."""
