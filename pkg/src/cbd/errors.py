"""Exception types raised across the package."""
from __future__ import annotations

from fractions import Fraction


class CbdError(Exception):
    """Base class for every error this package raises on purpose."""


class ValidationError(CbdError, ValueError):
    """A system of measurements violates a structural or probabilistic invariant."""


class DuplicateId(ValidationError):
    pass


class EmptyContext(ValidationError):
    pass


class UnknownObject(ValidationError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return ValidationError.__str__(self)


class AlphabetMismatch(ValidationError):
    pass


class ProbabilitySumNotOne(ValidationError):
    def __init__(self, context: str, total: Fraction):
        self.context = context
        self.total = total
        self.deficit = 1 - total
        super().__init__(
            f"probabilities in context {context!r} sum to {total}, "
            f"deficit {self.deficit}"
        )


class ParseError(CbdError, ValueError):
    """Input text could not be turned into a system or a list of trials."""


class FileSyntaxError(ParseError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class TrialFormatError(ParseError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class EmptyInput(CbdError, ValueError):
    pass


class InconsistentMembership(ValidationError):
    pass


class DimensionMismatch(CbdError, ValueError):
    pass


class ShapeMismatch(CbdError, ValueError):
    pass


class TooLarge(CbdError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"assignment space has {count} points, cap is {cap}")


class OracleTooLarge(CbdError):
    pass
