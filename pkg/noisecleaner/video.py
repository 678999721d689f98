"""
A video as the cleaner sees it: a bag of snippet features with one observed label.
"""
from dataclasses import dataclass

import numpy as np

from noisecleaner.errors import DatasetError


@dataclass
class VideoBag:
    """
    One video.

    `label` is the observed video-level label.  `ground_truth` holds the
    per-snippet labels when they are known; it is only ever used for
    evaluation.
    """
    video_id: str
    label: int
    features: np.ndarray
    ground_truth: np.ndarray = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.label not in (0, 1):
            raise DatasetError(u"Video '{}' has label {}, expected 0 or 1".format(self.video_id, self.label))
        self.label = int(self.label)
        if self.features.ndim != 2 or self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise DatasetError(u"Video '{}' has features of shape {}".format(self.video_id, self.features.shape))
        if not np.all(np.isfinite(self.features)):
            raise DatasetError(u"Video '{}' has non-finite features".format(self.video_id))
        if self.ground_truth is None:
            return
        self.ground_truth = np.asarray(self.ground_truth, dtype=np.uint8)
        if self.ground_truth.shape != (self.n_snippets,) or np.any(self.ground_truth > 1):
            raise DatasetError(u"Video '{}' needs one 0/1 ground-truth label per snippet".format(self.video_id))
        # One-sided noise: normal videos are normal throughout; anomalous ones contain an anomaly.
        if self.label == 0 and np.any(self.ground_truth):
            raise DatasetError(u"Normal video '{}' contains anomalous snippets".format(self.video_id))
        if self.label == 1 and not np.any(self.ground_truth):
            raise DatasetError(u"Anomalous video '{}' has no anomalous snippet".format(self.video_id))

    @property
    def n_snippets(self):
        return self.features.shape[0]

    @property
    def feature_dim(self):
        return self.features.shape[1]

    @property
    def is_anomalous(self):
        return self.label == 1


def check_dataset(dataset):
    """
    Validate a list of bags as one dataset: unique ids and a common feature width.

    Raises:
        DatasetError

    """
    if not dataset:
        raise DatasetError(u"The dataset is empty")
    ids = [bag.video_id for bag in dataset]
    if len(set(ids)) != len(ids):
        raise DatasetError(u"Video ids are not unique")
    widths = {bag.feature_dim for bag in dataset}
    if len(widths) != 1:
        raise DatasetError(u"Videos have different feature dimensions: {}".format(sorted(widths)))
    return dataset
