"""
The noise cleaner network.

Snippet features pass through two fully connected compression layers,
then through one stack of graph convolutions per graph (feature similarity
and temporal consistency).  Each stack ends in a scalar logit per snippet;
the logits are averaged and squashed by a sigmoid.

The backward pass is derived by hand.  A graph layer computes
S = A_hat H W, so its gradients are dW = (A_hat H)^T dS and
dH = A_hat^T dS W^T.
"""
from collections import OrderedDict
import dataclasses
from dataclasses import dataclass, field
import logging

import numpy as np

from noisecleaner.fileio.exceptions import CheckpointFileError
from noisecleaner.fileio.tensors import read_tensor_container, write_tensor_container
from noisecleaner.graphs.api import BRANCHES, RenormalizedAdjacency
from noisecleaner.nn import ACTIVATIONS, ParameterSet, activate, activation_grad, glorot_uniform, sigmoid
from noisecleaner.optim import OPTIMIZERS
from noisecleaner.optim import apply_update as _apply_update

from .errors import CleanerRequestError

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = 'cleaner'


@dataclass(frozen=True)
class CleanerConfig:
    """
    Architecture of the cleaner.

    `raw_dim` may be left unset in a template configuration and filled in
    once the feature dimension of the data is known.
    """
    raw_dim: int = None
    comp_dims: tuple = (512, 128)
    gcn_hidden: int = 32
    gcn_layers_per_branch: int = 2
    hidden_activation: str = 'relu'
    seed: int = 0
    branches: tuple = BRANCHES
    optimizer: str = 'adam'

    def __post_init__(self):
        object.__setattr__(self, 'comp_dims', tuple(self.comp_dims))
        object.__setattr__(self, 'branches', tuple(self.branches))

    def validate(self):
        if self.raw_dim is None or self.raw_dim < 1:
            raise CleanerRequestError(u"raw_dim must be a positive integer, got {}".format(self.raw_dim))
        if len(self.comp_dims) != 2 or min(self.comp_dims) < 1:
            raise CleanerRequestError(u"comp_dims must be two positive widths, got {}".format(self.comp_dims))
        if self.gcn_hidden < 1 or self.gcn_layers_per_branch < 1:
            raise CleanerRequestError(u"Graph layer widths and counts must be positive")
        if self.hidden_activation not in ACTIVATIONS:
            raise CleanerRequestError(u"Unknown activation '{}'".format(self.hidden_activation))
        if not self.branches or len(set(self.branches)) != len(self.branches) \
                or any(branch not in BRANCHES for branch in self.branches):
            raise CleanerRequestError(u"branches must be a non-empty subset of {}, got {}".format(
                BRANCHES, self.branches
            ))
        if self.optimizer not in OPTIMIZERS:
            raise CleanerRequestError(u"Unknown optimizer '{}'".format(self.optimizer))
        if self.seed < 0:
            raise CleanerRequestError(u"seed must be unsigned, got {}".format(self.seed))
        return self

    def graph_dims(self):
        """
        Input and output widths of each graph layer in a branch; the last layer outputs 1.
        """
        widths = [self.comp_dims[1]] + [self.gcn_hidden] * (self.gcn_layers_per_branch - 1) + [1]
        return list(zip(widths[:-1], widths[1:]))

    def to_dict(self):
        values = dataclasses.asdict(self)
        values['comp_dims'] = list(self.comp_dims)
        values['branches'] = list(self.branches)
        return values

    @classmethod
    def from_dict(cls, values):
        return cls(**values)


class CleanerParams(ParameterSet):
    """
    Weights of one cleaner together with its optimizer state.
    """

    def __init__(self, config, tensors=None):
        super(CleanerParams, self).__init__(tensors)
        self.config = config


@dataclass
class ForwardTrace:
    """
    Everything the backward pass needs from one forward evaluation.

    `branches` maps each branch name to its list of (A_hat H_in, pre-activation)
    pairs, one per graph layer.
    """
    features: np.ndarray
    operators: dict
    compress_pre: np.ndarray
    compress_hidden: np.ndarray
    compressed: np.ndarray
    branches: dict
    branch_logits: dict
    fused_logits: np.ndarray
    p: np.ndarray
    shapes: dict = field(default_factory=dict)

    @property
    def n_snippets(self):
        return self.features.shape[0]


def _compress_names(layer):
    return 'compress.{}.weight'.format(layer), 'compress.{}.bias'.format(layer)


def _graph_name(branch, layer):
    return '{}.{}.weight'.format(branch, layer)


def init_params(config):
    """
    Create fresh cleaner parameters.

    Weights are drawn uniformly from (-b, b), b = sqrt(6 / (fan_in + fan_out)),
    from a generator seeded by `config.seed`; biases are zero.

    Args:
        config (CleanerConfig)

    Returns:
        CleanerParams

    Raises:
        CleanerRequestError: The configuration is invalid.

    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    tensors = OrderedDict()
    fan_in = config.raw_dim
    for layer, fan_out in enumerate(config.comp_dims):
        weight_name, bias_name = _compress_names(layer)
        tensors[weight_name] = glorot_uniform(rng, fan_in, fan_out)
        tensors[bias_name] = np.zeros(fan_out)
        fan_in = fan_out
    for branch in config.branches:
        for layer, (fan_in, fan_out) in enumerate(config.graph_dims()):
            tensors[_graph_name(branch, layer)] = glorot_uniform(rng, fan_in, fan_out)
    return CleanerParams(config, tensors)


def graph_layer(operator, inputs, weight):
    """
    One graph convolution before its activation.

    Returns:
        tuple of (A_hat H, A_hat H W); the first is kept for the backward pass.

    """
    operator = operator.data if isinstance(operator, RenormalizedAdjacency) else np.asarray(operator)
    propagated = operator.dot(inputs)
    return propagated, propagated.dot(weight)


def _operator_data(operator, branch, n_snippets):
    if operator is None:
        raise CleanerRequestError(u"The '{}' branch needs a graph operator".format(branch))
    data = operator.data if isinstance(operator, RenormalizedAdjacency) else np.asarray(operator, dtype=np.float64)
    if data.shape != (n_snippets, n_snippets):
        raise CleanerRequestError(u"The '{branch}' graph has shape {shape}, expected {n} x {n}".format(
            branch=branch, shape=data.shape, n=n_snippets
        ))
    return data


def forward(x, a_f, a_t, params):
    """
    Evaluate the cleaner on the snippets of one video.

    Args:
        x (array-like): N x raw_dim snippet features.
        a_f (RenormalizedAdjacency): Feature-similarity operator, or None
            when the configuration has no feature branch.
        a_t (RenormalizedAdjacency): Temporal-consistency operator, or None
            when the configuration has no temporal branch.
        params (CleanerParams)

    Returns:
        ForwardTrace

    Raises:
        CleanerRequestError: Feature or graph dimensions do not match.

    """
    config = params.config
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] != config.raw_dim:
        raise CleanerRequestError(u"Features of shape {} do not match raw_dim {}".format(x.shape, config.raw_dim))
    n_snippets = x.shape[0]
    given = {'feature': a_f, 'temporal': a_t}
    operators = OrderedDict(
        (branch, _operator_data(given[branch], branch, n_snippets)) for branch in config.branches
    )

    act = config.hidden_activation
    weight, bias = (params[name] for name in _compress_names(0))
    compress_pre = x.dot(weight) + bias
    compress_hidden = activate(act, compress_pre)
    weight, bias = (params[name] for name in _compress_names(1))
    compressed = compress_hidden.dot(weight) + bias

    n_layers = config.gcn_layers_per_branch
    branches = OrderedDict()
    branch_logits = OrderedDict()
    for branch, operator in operators.items():
        hidden = compressed
        cache = []
        for layer in range(n_layers):
            propagated, pre = graph_layer(operator, hidden, params[_graph_name(branch, layer)])
            cache.append((propagated, pre))
            hidden = activate(act, pre) if layer < n_layers - 1 else pre
        branches[branch] = cache
        branch_logits[branch] = hidden[:, 0]

    fused_logits = np.mean(list(branch_logits.values()), axis=0)
    return ForwardTrace(
        features=x,
        operators=operators,
        compress_pre=compress_pre,
        compress_hidden=compress_hidden,
        compressed=compressed,
        branches=branches,
        branch_logits=branch_logits,
        fused_logits=fused_logits,
        p=sigmoid(fused_logits),
        shapes=params.shapes(),
    )


def predict(x, graphs, params):
    """
    Cleaned snippet probabilities for a video whose operators are held by `graphs` (VideoGraphs).
    """
    operators = {branch: graphs.operator(branch) for branch in params.config.branches}
    return forward(x, operators.get('feature'), operators.get('temporal'), params).p


def backward(trace, params, grad_p):
    """
    Gradients of a scalar loss with respect to every cleaner tensor.

    Args:
        trace (ForwardTrace): Produced by `forward` with these `params`.
        params (CleanerParams)
        grad_p (array-like): dL/dp, one entry per snippet.

    Returns:
        OrderedDict of tensor name -> gradient, same shapes as the tensors.

    Raises:
        CleanerRequestError: The trace does not match `params` or `grad_p`
            has the wrong length or non-finite entries.

    """
    config = params.config
    if dict(trace.shapes) != dict(params.shapes()):
        raise CleanerRequestError(u"Forward trace does not match the parameters (stale trace)")
    grad_p = np.asarray(grad_p, dtype=np.float64)
    if grad_p.shape != (trace.n_snippets,):
        raise CleanerRequestError(u"grad_p has shape {}, expected ({},)".format(grad_p.shape, trace.n_snippets))
    if not np.all(np.isfinite(grad_p)):
        raise CleanerRequestError(u"grad_p contains non-finite values")

    act = config.hidden_activation
    grads = OrderedDict((name, np.zeros_like(value)) for name, value in params.tensors.items())
    grad_logit = grad_p * trace.p * (1.0 - trace.p) / len(trace.branches)

    grad_compressed = np.zeros_like(trace.compressed)
    for branch, cache in trace.branches.items():
        operator = trace.operators[branch]
        grad_pre = grad_logit[:, None]
        grad_hidden = None
        for layer in reversed(range(len(cache))):
            propagated, pre = cache[layer]
            if layer < len(cache) - 1:
                grad_pre = activation_grad(act, pre, grad_hidden)
            weight_name = _graph_name(branch, layer)
            grads[weight_name] = propagated.T.dot(grad_pre)
            grad_hidden = operator.T.dot(grad_pre.dot(params[weight_name].T))
        grad_compressed += grad_hidden

    weight_name, bias_name = _compress_names(1)
    grads[weight_name] = trace.compress_hidden.T.dot(grad_compressed)
    grads[bias_name] = grad_compressed.sum(axis=0)
    grad_hidden = grad_compressed.dot(params[weight_name].T)
    grad_pre = activation_grad(act, trace.compress_pre, grad_hidden)
    weight_name, bias_name = _compress_names(0)
    grads[weight_name] = trace.features.T.dot(grad_pre)
    grads[bias_name] = grad_pre.sum(axis=0)
    return grads


def apply_update(params, grads, lr):
    """
    Update cleaner parameters in place with the optimizer named in their configuration.
    """
    _apply_update(params, grads, lr, optimizer=params.config.optimizer)


def save_params(params, path):
    """
    Write cleaner parameters and optimizer state to a tensor container.
    """
    tensors = OrderedDict(params.tensors)
    for name, (first, second) in params.moments.items():
        tensors['optimizer.m/' + name] = first
        tensors['optimizer.v/' + name] = second
    config = {'kind': CHECKPOINT_KIND, 'config': params.config.to_dict(), 'step': params.step}
    write_tensor_container(path, config, tensors)


def load_params(path):
    """
    Read cleaner parameters written by `save_params`.

    Raises:
        CheckpointFileError: The file is not a cleaner checkpoint or its
            tensors do not fit the stored configuration.

    """
    block, tensors = read_tensor_container(path)
    if block.get('kind') != CHECKPOINT_KIND:
        raise CheckpointFileError(u"'{}' is not a cleaner checkpoint".format(path))
    params = init_params(CleanerConfig.from_dict(block['config']))
    for name in params.names():
        value = tensors.get(name)
        if value is None or value.shape != params[name].shape:
            raise CheckpointFileError(u"Checkpoint tensor '{}' is missing or misshapen".format(name))
        params.tensors[name] = value
        params.moments[name] = (
            tensors.get('optimizer.m/' + name, np.zeros_like(value)),
            tensors.get('optimizer.v/' + name, np.zeros_like(value)),
        )
    params.step = int(block.get('step', 0))
    return params
