"""
Small dense-network building blocks shared by the cleaner and the builtin classifier.

Parameters live in a `ParameterSet`: an ordered mapping of tensor names to
float64 arrays together with the optimizer moments that belong to them.
"""
from collections import OrderedDict

import numpy as np

ACTIVATIONS = ('relu', 'tanh')


def glorot_uniform(rng, fan_in, fan_out):
    """
    Draw a fan_in x fan_out weight matrix from U(-b, b), b = sqrt(6 / (fan_in + fan_out)).
    """
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def activate(name, pre):
    if name == 'relu':
        return np.maximum(pre, 0.0)
    if name == 'tanh':
        return np.tanh(pre)
    raise ValueError(u"Unknown activation '{}'".format(name))


def activation_grad(name, pre, upstream):
    """
    Chain `upstream` through the activation evaluated at `pre`.
    """
    if name == 'relu':
        return upstream * (pre > 0.0)
    if name == 'tanh':
        return upstream * (1.0 - np.tanh(pre) ** 2)
    raise ValueError(u"Unknown activation '{}'".format(name))


PROBABILITY_FLOOR = np.finfo(np.float64).eps


def sigmoid(logits):
    """
    Logistic function, kept strictly inside (0, 1) even for saturated logits.
    """
    # Split by sign so neither branch overflows.
    logits = np.asarray(logits, dtype=np.float64)
    out = np.empty_like(logits)
    positive = logits >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-logits[positive]))
    exp_logits = np.exp(logits[~positive])
    out[~positive] = exp_logits / (1.0 + exp_logits)
    return np.clip(out, PROBABILITY_FLOOR, 1.0 - PROBABILITY_FLOOR)


class ParameterSet(object):
    """
    Named float64 tensors plus optimizer state.

    `moments` maps each tensor name to its (first, second) moment
    accumulators; `step` counts applied updates.
    """

    def __init__(self, tensors=None):
        self.tensors = OrderedDict()
        self.moments = OrderedDict()
        self.step = 0
        for name, value in (tensors or {}).items():
            self.tensors[name] = np.array(value, dtype=np.float64)
            self.moments[name] = (np.zeros_like(self.tensors[name]), np.zeros_like(self.tensors[name]))

    def __getitem__(self, name):
        return self.tensors[name]

    def __contains__(self, name):
        return name in self.tensors

    def names(self):
        return list(self.tensors)

    def shapes(self):
        return OrderedDict((name, value.shape) for name, value in self.tensors.items())

    def reset_optimizer(self):
        self.step = 0
        for name, value in self.tensors.items():
            self.moments[name] = (np.zeros_like(value), np.zeros_like(value))

    def copy(self):
        clone = self.__class__.__new__(self.__class__)
        clone.__dict__.update(self.__dict__)
        clone.tensors = OrderedDict((name, value.copy()) for name, value in self.tensors.items())
        clone.moments = OrderedDict(
            (name, (first.copy(), second.copy())) for name, (first, second) in self.moments.items()
        )
        return clone

    def is_finite(self):
        return all(np.all(np.isfinite(value)) for value in self.tensors.values())
