"""Exception types raised by the library and mapped to CLI exit codes."""

from __future__ import annotations


class HeisentraceError(Exception):
    """Base class for all library errors."""


class InputError(HeisentraceError, ValueError):
    """Malformed or out-of-range arguments (dimension mismatch, s = 0, ...)."""


class SingularityError(InputError):
    """Evaluation requested at a point where the object is not defined."""


class CapabilityError(HeisentraceError):
    """The request is well-formed but outside what is implemented."""


class ValidationError(HeisentraceError):
    """A symbol failed a consistency check (e.g. misdeclared tail)."""


class AccuracyError(HeisentraceError):
    """A numerical refinement or extrapolation did not converge.

    ``estimates`` holds the last estimates that failed to agree.
    """

    def __init__(self, message: str, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownIdentifierError(ParseError):
    pass


class UnboundVariableError(InputError):
    pass


class DomainError(InputError, ArithmeticError):
    """Expression evaluated outside its domain (division by zero, sqrt of a negative)."""
