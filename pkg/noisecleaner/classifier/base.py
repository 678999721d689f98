"""
The contract every snippet classifier honours.

The alternation loop only talks to classifiers through this interface, so
an externally trained action classifier can stand in for the builtin one.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import ClassifierRequestError


@dataclass
class TrainingSample:
    """
    The snippet features of one video with a soft target per snippet.
    """
    video_id: str
    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[0] < 1:
            raise ClassifierRequestError(u"Video '{}' has no snippets".format(self.video_id))
        if self.targets.shape != (self.features.shape[0],):
            raise ClassifierRequestError(u"Video '{}' has {} snippets but {} targets".format(
                self.video_id, self.features.shape[0], self.targets.shape
            ))
        if np.any(~np.isfinite(self.targets)) or np.any(self.targets < 0.0) or np.any(self.targets > 1.0):
            raise ClassifierRequestError(u"Targets of video '{}' must lie in [0, 1]".format(self.video_id))


class SnippetClassifier(ABC):
    """
    Scores every snippet of a video with an anomaly probability.
    """

    @abstractmethod
    def train(self, samples, epochs=None):
        """
        Fit the classifier from its current state.

        Args:
            samples (list of TrainingSample)

        Keyword Arguments:
            epochs (int): Overrides the configured budget; 0 leaves the
                classifier unchanged.

        Raises:
            ClassifierRequestError

        """

    @abstractmethod
    def predict(self, x):
        """
        Deterministic anomaly probabilities, one per row of `x`.
        """

    @abstractmethod
    def predict_sampled(self, x, m, jitter=None, seed=0):
        """
        Mean and variance of `m` stochastic evaluations of `x`.

        Returns:
            noisecleaner.cleaner.loss.NoisySnippetLabels

        """
