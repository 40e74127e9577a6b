"""Exception taxonomy shared across the package."""


class CharlabError(Exception):
    """Base class for all charlab errors."""


class DomainError(CharlabError, ValueError):
    """Input outside an operation's mathematical domain."""


class ResourceLimitError(CharlabError, RuntimeError):
    """Request exceeds a configured resource ceiling."""


class IncompleteFactorizationError(CharlabError, RuntimeError):
    """A cofactor could not be resolved into primes."""


class SearchFailureError(CharlabError, RuntimeError):
    """An extremal search produced no admissible candidate."""
