class UsageError(ValueError):
    """Malformed or inconsistent input (bad flag value, dimension mismatch)."""


class DomainError(ValueError):
    """A quantity evaluated outside the range where it is defined."""


class InvariantError(RuntimeError):
    """A deterministic invariant failed on computed output."""
