"""
Errors for the noise cleaner network and its losses.
"""
from noisecleaner.errors import NoiseCleanerError


class CleanerError(NoiseCleanerError):
    """Generic cleaner error."""
    pass


class CleanerRequestError(CleanerError):
    """Error indicating invalid input to the cleaner.

    Raised for invalid configurations, dimension mismatches between
    features, graphs and parameters, stale forward traces, empty
    high-confidence sets and uninitialized ensembling state.

    """
    pass
