"""Exception hierarchy.

Everything derived from :class:`EngineError` is a domain failure (CLI exit
code 2).  :class:`ParseError` is a usage failure (exit code 1).
"""


class EngineError(Exception):
    pass


class FloorTooDeep(EngineError):
    """A requested truncation floor is below what the operands can support."""


class FloorTooShallow(EngineError):
    """A coefficient below the tracked floor was asked for."""


class InconsistentFlow(EngineError):
    pass


class InsufficientCoefficients(EngineError):
    pass


class InconsistentExpansion(EngineError):
    pass


class NotIntegrable(EngineError):
    pass


class InexactKappaDivision(ArithmeticError):
    """Division by kappa left a remainder.  Always an internal bug."""


class ParseError(ValueError):
    def __init__(self, message, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)
