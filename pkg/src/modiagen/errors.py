"""Exception types shared across the package."""


class RowOverflowError(ValueError):
    """A tableau reading needed more than k-1 rows (diagram has a k-crossing)."""


class MalformedSequenceError(ValueError):
    """Consecutive shapes in a sequence do not differ by at most one square."""


class NormalizationError(AssertionError):
    """Transition weights failed to sum to the state's table entry."""


class GiveUpError(RuntimeError):
    """Sampler exceeded its restart budget."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class CacheError(ValueError):
    """Persisted table failed validation (wrong key, version, or corrupt data)."""


class OracleCapError(ValueError):
    """Brute-force enumeration requested above the configured cap."""
