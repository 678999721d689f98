"""
Errors shared by every part of the noise cleaner.
"""


class NoiseCleanerError(Exception):
    """A generic error raised by the noise cleaner.

    Every error defined in this package derives from it, so callers
    (the management commands in particular) can catch a single type.

    """
    pass


class NumericalError(NoiseCleanerError):
    """A computation produced values that cannot be used.

    Raised when a parameter update would write NaN or infinite values
    into a model.  The update is refused and the model is left untouched.

    """
    pass


class DatasetError(NoiseCleanerError):
    """A video bag or dataset violates the labelling rules.

    Normal videos may not contain anomalous snippets, anomalous videos
    must contain at least one, and every snippet needs finite features.

    """
    pass


class SyntheticDataRequestError(DatasetError):
    """The synthetic data configuration cannot be generated."""
    pass


class EvaluationRequestError(NoiseCleanerError):
    """Scores and labels cannot be evaluated.

    Raised for mismatched lengths or when the labels lack the class a
    metric needs (AUC needs both classes, the false-alarm rate needs
    negatives).

    """
    pass


class ConfigRequestError(NoiseCleanerError):
    """A run configuration or command-line option is invalid."""
    pass
