"""Exception hierarchy shared by every module of the package."""


class TriadicError(Exception):
    """Base class for all errors raised by :mod:`triadic`."""


class PreconditionError(TriadicError, ValueError):
    """An input violates a documented precondition."""


class SizeLimitExceeded(PreconditionError):
    pass


class DegenerateFamily(PreconditionError):
    pass


class InvalidLevel(PreconditionError):
    pass


class InvalidThresholds(PreconditionError):
    pass


class InvalidOrdering(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class ComplementarityViolation(PreconditionError):
    """Raised when p-value pairs are not complementary and no override was given.

    ``rows`` holds the offending 1-based indices.
    """

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class NotFreeCombination(PreconditionError):
    pass


class IdentityModeRequired(PreconditionError):
    pass


class DegenerateColumn(PreconditionError):
    pass


class InsufficientSamples(PreconditionError):
    pass


class ConfigError(PreconditionError):
    pass


class ParseError(TriadicError):
    """Malformed input file. ``line`` is the 1-based line number, if known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InternalInconsistency(TriadicError, RuntimeError):
    """An invariant that correct inputs can never break was broken."""
