"""Exception hierarchy shared across the package."""

from __future__ import annotations


class LineaError(Exception):
    """Base class for all errors raised by linea."""


class DegeneratePolygon(LineaError, ValueError):
    pass


class EmptyDataset(LineaError, ValueError):
    pass


class NotAdjacent(LineaError, ValueError):
    pass


class UnknownNode(LineaError, KeyError):
    pass


class InvalidSpec(LineaError, ValueError):
    pass


class FormatError(LineaError, ValueError):
    pass


class ConfigError(LineaError, ValueError):
    pass


class ParseError(LineaError, SyntaxError):
    """Raised when a rule script does not conform to the grammar.

    Carries the 1-based ``line``/``column`` of the offending token and the set
    of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class EvalError(LineaError):
    """Base class for runtime errors of the rule engine."""


class TypeMismatch(EvalError, TypeError):
    pass


class UnboundVariable(EvalError, NameError):
    pass


class MissingProperty(EvalError, KeyError):
    pass


class MutationInRead(EvalError):
    pass
