"""Exception hierarchy shared by every module."""


class GammoidError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GammoidError):
    """Malformed input text. ``line`` is 1-based, or None for whole-document errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownVertexError(ParseError):
    """An edge, exit or set refers to an identifier that was never declared."""


class ParameterError(GammoidError):
    """Inadmissible generator or operation parameter."""


class ContractViolation(GammoidError):
    """A documented precondition of an operation does not hold."""


class ModeError(GammoidError):
    """Structural precondition (tree mode, bipartition, orientation) fails."""


class SizeGuardError(GammoidError):
    """Ground set too large for exhaustive enumeration."""


class ConsistencyError(GammoidError):
    """An internal cross-check disagreed. Always a bug signal."""
