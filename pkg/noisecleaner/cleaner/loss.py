"""
Losses that supervise the cleaner.

The direct term is a cross-entropy against the classifier's mean predictions,
restricted to the snippets the classifier is most confident about.  The
indirect term pulls every prediction towards a discounted running average of
the cleaner's own earlier predictions (temporal ensembling), warm-started
from the classifier's means.
"""
from dataclasses import dataclass
import logging

import numpy as np

from .errors import CleanerRequestError

logger = logging.getLogger(__name__)

# Probabilities are clamped to [EPSILON, 1 - EPSILON] before taking logs.
EPSILON = 1e-7


@dataclass
class NoisySnippetLabels:
    """
    Per-snippet mean and variance of M stochastic classifier evaluations.
    """
    mean: np.ndarray
    variance: np.ndarray
    n_samples: int = 1

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.variance = np.asarray(self.variance, dtype=np.float64)
        if self.mean.ndim != 1 or self.mean.shape != self.variance.shape:
            raise CleanerRequestError(u"mean and variance must be vectors of equal length")
        if self.n_samples < 1:
            raise CleanerRequestError(u"n_samples must be at least 1, got {}".format(self.n_samples))
        if np.any(self.mean < 0.0) or np.any(self.mean > 1.0) or np.any(self.variance < 0.0):
            raise CleanerRequestError(u"Means must lie in [0, 1] and variances must be non-negative")
        if self.n_samples == 1 and np.any(self.variance != 0.0):
            raise CleanerRequestError(u"A single sample cannot have non-zero variance")

    def __len__(self):
        return len(self.mean)


@dataclass(frozen=True)
class HighConfidenceSet:
    """
    Strictly increasing indices of the snippets used for direct supervision.
    """
    indices: np.ndarray
    fraction: float

    def __len__(self):
        return len(self.indices)


@dataclass
class EmaState:
    """
    Discount-weighted running average of cleaner predictions.
    """
    p_bar: np.ndarray
    alpha: float
    initialized: bool = False

    def __len__(self):
        return len(self.p_bar)


def select_high_confidence(labels, fraction):
    """
    Select the max(1, floor(fraction * N)) snippets with the smallest variance.

    Ties are broken by the smaller index, so the result only depends on the
    ordering of the variances.

    Args:
        labels (NoisySnippetLabels)
        fraction (float): Selection fraction in (0, 1].

    Returns:
        HighConfidenceSet

    Raises:
        CleanerRequestError: Empty labels or a fraction outside (0, 1].

    """
    n_snippets = len(labels)
    if n_snippets == 0:
        raise CleanerRequestError(u"Cannot select high-confidence snippets from an empty video")
    if not 0.0 < fraction <= 1.0:
        raise CleanerRequestError(u"Confidence fraction must lie in (0, 1], got {}".format(fraction))
    count = max(1, int(np.floor(fraction * n_snippets)))
    chosen = np.argsort(labels.variance, kind='stable')[:count]
    return HighConfidenceSet(indices=np.sort(chosen), fraction=fraction)


def _check_probabilities(p, n_snippets):
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (n_snippets,):
        raise CleanerRequestError(u"Predictions have shape {}, expected ({},)".format(p.shape, n_snippets))
    return p


def direct_loss(p, labels, h):
    """
    Mean cross-entropy between predictions and classifier means over `h`.

    Returns:
        tuple of (float loss, numpy.ndarray dL/dp); the gradient is zero
        outside `h` and is taken at the clamped probabilities.

    Raises:
        CleanerRequestError: Empty `h` or mismatched lengths.

    """
    if len(h) == 0:
        raise CleanerRequestError(u"The high-confidence set is empty")
    p = np.clip(_check_probabilities(p, len(labels)), EPSILON, 1.0 - EPSILON)
    chosen = p[h.indices]
    targets = labels.mean[h.indices]
    size = float(len(h))
    loss = -np.sum(targets * np.log(chosen) + (1.0 - targets) * np.log(1.0 - chosen)) / size
    grad = np.zeros_like(p)
    grad[h.indices] = (chosen - targets) / (size * chosen * (1.0 - chosen))
    return float(loss), grad


def indirect_loss(p, ema):
    """
    Mean absolute deviation from the ensembled predictions, with sign(0) = 0 subgradient.

    Raises:
        CleanerRequestError: The ensembling state is uninitialized or the
            lengths differ.

    """
    if not ema.initialized:
        raise CleanerRequestError(u"Temporal ensembling state is not initialized")
    p = _check_probabilities(p, len(ema))
    size = float(len(p))
    difference = p - ema.p_bar
    return float(np.sum(np.abs(difference)) / size), np.sign(difference) / size


def total_loss(p, labels, h, ema, use_indirect=True):
    """
    Direct plus indirect supervision; gradients add.

    Keyword Arguments:
        use_indirect (bool): Drop the indirect term when False.

    """
    loss, grad = direct_loss(p, labels, h)
    if use_indirect:
        extra_loss, extra_grad = indirect_loss(p, ema)
        loss += extra_loss
        grad = grad + extra_grad
    return loss, grad


def init_ema(labels, alpha):
    """
    Warm-start the ensembled predictions from the classifier means.

    Raises:
        CleanerRequestError: `alpha` is outside [0, 1).

    """
    if not 0.0 <= alpha < 1.0:
        raise CleanerRequestError(u"EMA discount must lie in [0, 1), got {}".format(alpha))
    return EmaState(p_bar=labels.mean.copy(), alpha=float(alpha), initialized=True)


def update_ema(ema, p):
    """
    p_bar <- alpha * p_bar + (1 - alpha) * p, in place and without bias correction.

    Raises:
        CleanerRequestError: Uninitialized state or length mismatch.

    """
    if not ema.initialized:
        raise CleanerRequestError(u"Temporal ensembling state is not initialized")
    p = _check_probabilities(p, len(ema))
    ema.p_bar *= ema.alpha
    ema.p_bar += (1.0 - ema.alpha) * p
    np.clip(ema.p_bar, 0.0, 1.0, out=ema.p_bar)
