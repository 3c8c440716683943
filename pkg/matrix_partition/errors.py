"""Exception hierarchy shared by the library and the command line.

Every class carries the exit code the CLI reports for it.
"""

from typing import Optional


class MatrixPartitionError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class ValidationError(MatrixPartitionError, ValueError):
    """Input violates a structural invariant (labels, arities, domains)."""


class SignatureMismatch(ValidationError):
    pass


class NotAHomomorphism(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed text input. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.reason = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceeded(MatrixPartitionError):
    """A configured resource cap would be exceeded."""

    exit_code = 3


class SearchTimeout(CapExceeded):
    pass
