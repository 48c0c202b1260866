"""Exception types shared across the package."""


class GraphSecretError(Exception):
    """Base class for all package errors."""


class InvalidInput(GraphSecretError, ValueError):
    """Malformed graph, protocol, pattern or vertex set."""


class SizeBoundExceeded(GraphSecretError, ValueError):
    """An input is larger than the configured enumeration/simulation bound."""


class PatternError(InvalidInput):
    """A measurement pattern is not well formed."""


class ConsistencyViolation(GraphSecretError, RuntimeError):
    """An internal cross-check failed. This always indicates a bug."""


class DichotomyViolation(ConsistencyViolation):
    """Both or neither of the access/blocking witnesses exist for a set."""
