"""Exception types shared across the package."""


class CompsenseError(Exception):
    """Base class for all errors raised by compsense."""


class UsageError(CompsenseError, ValueError):
    """A caller passed arguments that violate an operation's contract."""


class PreconditionError(UsageError):
    """Input data does not satisfy the preconditions of a query."""


class ParseError(CompsenseError):
    """A text input could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(ParseError):
    """Parsed input is well-formed line by line but structurally invalid."""


class IndexFormatError(CompsenseError):
    """An index file could not be loaded."""
