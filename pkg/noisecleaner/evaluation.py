"""
Snippet-level ROC curves, AUC and false-alarm rates.

A snippet counts as an alarm when its score is greater than or equal to
the threshold, both for the ROC sweep and for `false_alarm_rate`.
"""
import csv
from dataclasses import dataclass
import logging

import numpy as np

from noisecleaner.errors import EvaluationRequestError

logger = logging.getLogger(__name__)

CSV_HEADER = ['threshold', 'fpr', 'tpr']


@dataclass(frozen=True)
class RocCurve:
    """
    Points of a ROC curve, ordered by descending threshold.

    The first point is (0, 0) at threshold +inf; the last is (1, 1) at the
    smallest score.
    """
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def __len__(self):
        return len(self.thresholds)

    def area(self):
        """
        Trapezoidal area under the curve.
        """
        return float(np.sum(np.diff(self.fpr) * (self.tpr[1:] + self.tpr[:-1])) / 2.0)


def _scores_and_labels(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise EvaluationRequestError(u"Got {} scores for {} labels".format(len(scores), len(labels)))
    if not np.all(np.isin(labels, (0, 1))):
        raise EvaluationRequestError(u"Labels must be 0 or 1")
    if not np.all(np.isfinite(scores)):
        raise EvaluationRequestError(u"Scores must be finite")
    return scores, labels.astype(bool)


def _require_both_classes(labels):
    if labels.all() or not labels.any():
        raise EvaluationRequestError(u"ROC analysis needs at least one positive and one negative label")


def roc_curve(scores, labels):
    """
    ROC curve with one point per distinct score, plus the (0, 0) origin.

    Raises:
        EvaluationRequestError: Mismatched lengths, non-binary labels or a
            single class.

    """
    scores, labels = _scores_and_labels(scores, labels)
    _require_both_classes(labels)
    order = np.argsort(-scores, kind='stable')
    scores, labels = scores[order], labels[order]
    # Last index of every run of equal scores.
    last = np.r_[np.flatnonzero(np.diff(scores)), len(scores) - 1]
    true_positives = np.cumsum(labels)[last]
    false_positives = (last + 1) - true_positives
    return RocCurve(
        thresholds=np.r_[np.inf, scores[last]],
        fpr=np.r_[0.0, false_positives / float(false_positives[-1])],
        tpr=np.r_[0.0, true_positives / float(true_positives[-1])],
    )


def auc(scores, labels):
    """
    Area under the ROC curve: P(positive outranks negative) + P(tie) / 2.

    Raises:
        EvaluationRequestError

    """
    return roc_curve(scores, labels).area()


def pairwise_auc(scores, labels):
    """
    Mann-Whitney statistic by explicit comparison of every positive/negative pair.
    """
    scores, labels = _scores_and_labels(scores, labels)
    _require_both_classes(labels)
    positives = scores[labels][:, None]
    negatives = scores[~labels][None, :]
    wins = np.sum(positives > negatives) + 0.5 * np.sum(positives == negatives)
    return float(wins) / (positives.size * negatives.size)


def false_alarm_rate(scores, labels, threshold=0.5):
    """
    Fraction of negative snippets scored at or above `threshold`.

    Raises:
        EvaluationRequestError: No negative labels.

    """
    scores, labels = _scores_and_labels(scores, labels)
    negatives = scores[~labels]
    if negatives.size == 0:
        raise EvaluationRequestError(u"The false-alarm rate needs at least one negative label")
    return float(np.sum(negatives >= threshold)) / negatives.size


def expand_to_frames(scores, labels, frames_per_snippet):
    """
    Repeat every snippet score and label `frames_per_snippet` times.
    """
    if frames_per_snippet < 1:
        raise EvaluationRequestError(u"frames_per_snippet must be positive, got {}".format(frames_per_snippet))
    scores, labels = _scores_and_labels(scores, labels)
    return np.repeat(scores, frames_per_snippet), np.repeat(labels.astype(np.uint8), frames_per_snippet)


def write_roc_csv(curve, path):
    """
    Write the curve as `threshold,fpr,tpr` rows, the first threshold being `inf`.
    """
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for threshold, fpr, tpr in zip(curve.thresholds, curve.fpr, curve.tpr):
            writer.writerow([repr(float(threshold)), repr(float(fpr)), repr(float(tpr))])
