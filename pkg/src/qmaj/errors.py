class QmajError(Exception):
    pass


class DomainError(QmajError, ValueError):
    """An argument lies outside the operation's domain (bad index, size mismatch)."""


class ValidationError(QmajError, ValueError):
    """An input object violates its invariants (non-unitary matrix, bad norm)."""


class InvariantError(QmajError, RuntimeError):
    """An internal invariant broke during a computation."""
