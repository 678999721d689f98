"""
A lightweight snippet classifier trained on precomputed snippet features.

It is either logistic regression (`hidden_width` 0) or a network with one
hidden layer, trained full batch with Adam on the binary cross-entropy
against soft per-snippet targets.  Confidence is estimated by evaluating
copies of the features perturbed with Gaussian jitter.
"""
from collections import OrderedDict
import dataclasses
from dataclasses import dataclass
import logging

import numpy as np

from noisecleaner.cleaner.loss import EPSILON, NoisySnippetLabels
from noisecleaner.fileio.exceptions import CheckpointFileError
from noisecleaner.fileio.tensors import read_tensor_container, write_tensor_container
from noisecleaner.nn import ACTIVATIONS, ParameterSet, activate, activation_grad, glorot_uniform, sigmoid
from noisecleaner.optim import apply_update

from .base import SnippetClassifier
from .errors import ClassifierRequestError

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = 'classifier'


@dataclass(frozen=True)
class BuiltinClassifierConfig:
    hidden_width: int = 0
    epochs: int = 200
    lr: float = 0.05
    jitter_sigma: float = 0.1
    seed: int = 0
    hidden_activation: str = 'relu'
    hard_targets: bool = False

    def validate(self):
        if self.hidden_width < 0:
            raise ClassifierRequestError(u"hidden_width must be non-negative, got {}".format(self.hidden_width))
        if self.epochs < 1:
            raise ClassifierRequestError(u"epochs must be at least 1, got {}".format(self.epochs))
        if not self.lr > 0:
            raise ClassifierRequestError(u"lr must be positive, got {}".format(self.lr))
        if self.jitter_sigma < 0:
            raise ClassifierRequestError(u"jitter_sigma must be non-negative, got {}".format(self.jitter_sigma))
        if self.hidden_activation not in ACTIVATIONS:
            raise ClassifierRequestError(u"Unknown activation '{}'".format(self.hidden_activation))
        if self.seed < 0:
            raise ClassifierRequestError(u"seed must be unsigned, got {}".format(self.seed))
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, values):
        return cls(**values)


def _stack(samples, hard_targets):
    if not samples:
        raise ClassifierRequestError(u"Cannot train on an empty dataset")
    features = np.concatenate([sample.features for sample in samples])
    targets = np.concatenate([sample.targets for sample in samples])
    if hard_targets:
        targets = (targets >= 0.5).astype(np.float64)
    return features, targets


class BuiltinSnippetClassifier(SnippetClassifier):
    """
    Logistic or one-hidden-layer snippet classifier.

    Parameters are created on the first call to `train` (or eagerly when
    `feature_dim` is given), from a generator seeded by `config.seed`.
    """

    def __init__(self, config=None, feature_dim=None):
        self.config = (config or BuiltinClassifierConfig()).validate()
        self.params = None
        if feature_dim is not None:
            self._init_params(feature_dim)

    @property
    def feature_dim(self):
        if self.params is None:
            return None
        first = 'hidden.weight' if self.config.hidden_width else 'output.weight'
        return self.params[first].shape[0]

    @property
    def is_trained(self):
        return self.params is not None and self.params.step > 0

    def _init_params(self, feature_dim):
        rng = np.random.default_rng(self.config.seed)
        tensors = OrderedDict()
        width = feature_dim
        if self.config.hidden_width:
            tensors['hidden.weight'] = glorot_uniform(rng, feature_dim, self.config.hidden_width)
            tensors['hidden.bias'] = np.zeros(self.config.hidden_width)
            width = self.config.hidden_width
        tensors['output.weight'] = glorot_uniform(rng, width, 1)
        tensors['output.bias'] = np.zeros(1)
        self.params = ParameterSet(tensors)

    def _check_features(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.params is None:
            raise ClassifierRequestError(u"The classifier has not been trained")
        if x.ndim != 2 or x.shape[1] != self.feature_dim:
            raise ClassifierRequestError(u"Features of shape {} do not match feature dimension {}".format(
                x.shape, self.feature_dim
            ))
        return x

    def _forward(self, x):
        act = self.config.hidden_activation
        hidden_pre = None
        hidden = x
        if self.config.hidden_width:
            hidden_pre = x.dot(self.params['hidden.weight']) + self.params['hidden.bias']
            hidden = activate(act, hidden_pre)
        logits = hidden.dot(self.params['output.weight'])[:, 0] + self.params['output.bias'][0]
        return hidden_pre, hidden, sigmoid(logits)

    def _gradients(self, x, targets):
        hidden_pre, hidden, p = self._forward(x)
        # Sigmoid and cross-entropy together give dL/dlogit = p - t.
        grad_logits = ((p - targets) / len(targets))[:, None]
        grads = OrderedDict()
        grads['output.weight'] = hidden.T.dot(grad_logits)
        grads['output.bias'] = grad_logits.sum(axis=0)
        if self.config.hidden_width:
            grad_hidden = grad_logits.dot(self.params['output.weight'].T)
            grad_pre = activation_grad(self.config.hidden_activation, hidden_pre, grad_hidden)
            grads['hidden.weight'] = x.T.dot(grad_pre)
            grads['hidden.bias'] = grad_pre.sum(axis=0)
        return p, grads

    def train(self, samples, epochs=None):
        """
        Minimize the mean binary cross-entropy over every snippet of `samples`.

        The optimizer state is reset on each call, so training is a pure
        function of the current weights, the samples and the budget.
        """
        features, targets = _stack(samples, self.config.hard_targets)
        epochs = self.config.epochs if epochs is None else epochs
        if epochs < 0:
            raise ClassifierRequestError(u"epochs must be non-negative, got {}".format(epochs))
        if self.params is None:
            self._init_params(features.shape[1])
        self._check_features(features)
        if epochs == 0:
            return

        self.params.reset_optimizer()
        for epoch in range(epochs):
            p, grads = self._gradients(features, targets)
            apply_update(self.params, grads, self.config.lr)
            if logger.isEnabledFor(logging.DEBUG) and (epoch + 1) % 50 == 0:
                clipped = np.clip(p, EPSILON, 1.0 - EPSILON)
                loss = -np.mean(targets * np.log(clipped) + (1.0 - targets) * np.log(1.0 - clipped))
                logger.debug(u"Classifier epoch {}: loss {:.6f}".format(epoch + 1, loss))
        logger.info(u"Trained classifier on {} snippets from {} videos for {} epochs".format(
            len(targets), len(samples), epochs
        ))

    def predict(self, x):
        return self._forward(self._check_features(x))[2]

    def predict_sampled(self, x, m, jitter=None, seed=0):
        """
        Evaluate `m` copies of `x` with additive N(0, jitter^2) noise.

        Args:
            x (array-like): N x d snippet features.
            m (int): Number of evaluations, at least 1.

        Keyword Arguments:
            jitter (float): Noise scale; defaults to `config.jitter_sigma`.
            seed (int or sequence): Seed of the sampling generator.

        Returns:
            NoisySnippetLabels with the sample mean and unbiased sample
            variance; the variance is exactly zero when m is 1 or jitter is 0.

        """
        x = self._check_features(x)
        if m < 1:
            raise ClassifierRequestError(u"m must be at least 1, got {}".format(m))
        jitter = self.config.jitter_sigma if jitter is None else jitter
        if jitter < 0:
            raise ClassifierRequestError(u"jitter must be non-negative, got {}".format(jitter))
        if m == 1 or jitter == 0:
            return NoisySnippetLabels(self.predict(x), np.zeros(len(x)), m)
        rng = np.random.default_rng(seed)
        samples = np.stack([self.predict(x + jitter * rng.standard_normal(x.shape)) for __ in range(m)])
        return NoisySnippetLabels(samples.mean(axis=0), samples.var(axis=0, ddof=1), m)

    def save(self, path):
        if self.params is None:
            raise ClassifierRequestError(u"Cannot save a classifier that has no parameters")
        tensors = OrderedDict(self.params.tensors)
        block = {
            'kind': CHECKPOINT_KIND,
            'config': self.config.to_dict(),
            'feature_dim': self.feature_dim,
            'step': self.params.step,
        }
        write_tensor_container(path, block, tensors)

    @classmethod
    def load(cls, path):
        """
        Raises:
            CheckpointFileError: The file is not a classifier checkpoint.
        """
        block, tensors = read_tensor_container(path)
        if block.get('kind') != CHECKPOINT_KIND:
            raise CheckpointFileError(u"'{}' is not a classifier checkpoint".format(path))
        classifier = cls(BuiltinClassifierConfig.from_dict(block['config']), feature_dim=block['feature_dim'])
        for name in classifier.params.names():
            value = tensors.get(name)
            if value is None or value.shape != classifier.params[name].shape:
                raise CheckpointFileError(u"Checkpoint tensor '{}' is missing or misshapen".format(name))
            classifier.params.tensors[name] = value
        classifier.params.reset_optimizer()
        classifier.params.step = int(block.get('step', 0))
        return classifier
