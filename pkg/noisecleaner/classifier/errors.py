"""
Errors raised by snippet classifiers.
"""
from noisecleaner.errors import NoiseCleanerError


class ClassifierError(NoiseCleanerError):
    """A snippet classifier could not perform the requested action."""
    pass


class ClassifierRequestError(ClassifierError):
    """This error is raised when a classifier is used incorrectly.

    Examples are an empty training set, targets outside [0, 1], features
    whose width differs from the trained model, or predicting before the
    classifier has been trained.

    """
    pass
