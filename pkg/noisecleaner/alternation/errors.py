"""
Errors raised by the alternation driver.
"""
from noisecleaner.errors import NoiseCleanerError


class AlternationError(NoiseCleanerError):
    """The alternation between classifier and cleaner could not proceed."""
    pass


class AlternationRequestError(AlternationError):
    """This error is raised for unusable alternation input.

    Examples are a dataset without anomalous or without normal videos, an
    evaluation set without ground truth, or cleaned labels missing for an
    anomalous video.

    """
    pass


class AlternationInternalError(AlternationError):
    """A cleaner or classifier failed while the alternation was running.

    The original error is chained as the cause.

    """
    pass
