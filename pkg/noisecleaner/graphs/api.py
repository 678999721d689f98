"""
Public interface for building the graphs the cleaner convolves over.

Every graph here is dense: a video has at most a few thousand snippets,
so an N x N float64 matrix is cheap and keeps the arithmetic exact enough
to be checked against a direct evaluation of the formulas.
"""
from dataclasses import dataclass
import enum
import logging

from lazy import lazy
import numpy as np

from .errors import GraphRequestError

logger = logging.getLogger(__name__)

BRANCHES = ('feature', 'temporal')


class AdjacencyKind(enum.Enum):
    FEATURE_SIMILARITY = 'feature_similarity'
    TEMPORAL_CONSISTENCY = 'temporal_consistency'
    CONSTANT = 'constant'


def _frozen(array):
    array = np.array(array, dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Adjacency:
    """
    Weighted adjacency matrix of one video graph.

    The matrix is copied and marked read-only on construction.
    """
    data: np.ndarray
    kind: AdjacencyKind

    def __post_init__(self):
        object.__setattr__(self, 'data', _frozen(self.data))

    @property
    def n_nodes(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class RenormalizedAdjacency:
    """
    The operator D^(-1/2) (A + I) D^(-1/2) applied by every graph layer.
    """
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'data', _frozen(self.data))

    @property
    def n_nodes(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class GraphConfig:
    """
    How the two graphs of a video are built.

    Setting `feature_constant` or `temporal_constant` replaces that graph
    with a constant matrix, which removes the structure the branch relies on
    while keeping its layers intact.
    """
    symmetrize_similarity: bool = False
    feature_constant: float = None
    temporal_constant: float = None

    def validate(self):
        for name in ('feature_constant', 'temporal_constant'):
            value = getattr(self, name)
            if value is not None and not 0.0 < value <= 1.0:
                raise GraphRequestError(
                    u"{name} must lie in (0, 1], got {value}".format(name=name, value=value)
                )
        return self

    @classmethod
    def from_dict(cls, values):
        return cls(**values).validate()


def as_feature_matrix(x):
    """
    Validate a snippet feature matrix.

    Args:
        x (array-like): N x d matrix, one row per snippet.

    Returns:
        numpy.ndarray of float64

    Raises:
        GraphRequestError: The matrix is not two-dimensional, is empty,
            or holds non-finite values.

    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise GraphRequestError(
            u"Features must be a non-empty N x d matrix, got shape {}".format(x.shape)
        )
    if not np.all(np.isfinite(x)):
        raise GraphRequestError(u"Features contain non-finite values")
    return x


def build_feature_similarity(x, symmetrize=False):
    """
    Build the feature-similarity adjacency of a video.

    Entry (i, j) is exp(X_i . X_j - max_k X_i . X_k), so every row reaches
    exactly 1 at its most similar snippet and all entries lie in (0, 1].
    The row-wise maximum makes the matrix asymmetric in general.

    Args:
        x (array-like): N x d snippet features.

    Keyword Arguments:
        symmetrize (bool): Average the matrix with its transpose.

    Returns:
        Adjacency

    Raises:
        GraphRequestError

    """
    x = as_feature_matrix(x)
    dots = x.dot(x.T)
    similarity = np.exp(dots - dots.max(axis=1, keepdims=True))
    if symmetrize:
        similarity = 0.5 * (similarity + similarity.T)
    return Adjacency(similarity, AdjacencyKind.FEATURE_SIMILARITY)


def build_temporal_consistency(n):
    """
    Build the temporal-consistency adjacency exp(-|i - j|) for `n` snippets.

    Raises:
        GraphRequestError: `n` is smaller than one.

    """
    if n < 1:
        raise GraphRequestError(u"A temporal graph needs at least one snippet, got {}".format(n))
    index = np.arange(n, dtype=np.float64)
    return Adjacency(np.exp(-np.abs(index[:, None] - index[None, :])), AdjacencyKind.TEMPORAL_CONSISTENCY)


def build_constant(n, value):
    """
    Build an `n` x `n` adjacency filled with `value`.

    Raises:
        GraphRequestError: `n` is smaller than one or `value` is outside (0, 1].

    """
    if n < 1:
        raise GraphRequestError(u"A constant graph needs at least one snippet, got {}".format(n))
    if not 0.0 < value <= 1.0:
        raise GraphRequestError(u"Constant adjacency value must lie in (0, 1], got {}".format(value))
    return Adjacency(np.full((n, n), float(value)), AdjacencyKind.CONSTANT)


def renormalize(a):
    """
    Apply the renormalization trick to an adjacency.

    Adds self-loops and scales by the inverse square root of the row sums
    on both sides.  The degree comes from row sums, so an asymmetric input
    stays asymmetric.

    Args:
        a (Adjacency or array-like): Square, finite, non-negative matrix.

    Returns:
        RenormalizedAdjacency

    Raises:
        GraphRequestError

    """
    data = a.data if isinstance(a, Adjacency) else np.asarray(a, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise GraphRequestError(u"Adjacency must be square, got shape {}".format(data.shape))
    if not np.all(np.isfinite(data)):
        raise GraphRequestError(u"Adjacency contains non-finite values")
    if np.any(data < 0):
        raise GraphRequestError(u"Adjacency contains negative entries")

    self_looped = data + np.eye(data.shape[0])
    inv_sqrt_degree = 1.0 / np.sqrt(self_looped.sum(axis=1))
    return RenormalizedAdjacency(inv_sqrt_degree[:, None] * self_looped * inv_sqrt_degree[None, :])


def spectral_radius(a, iterations=200):
    """
    Estimate the largest absolute eigenvalue of a square matrix by power iteration.

    Args:
        a (Adjacency, RenormalizedAdjacency or array-like)

    Raises:
        GraphRequestError: The matrix is not square.

    """
    data = a.data if isinstance(a, (Adjacency, RenormalizedAdjacency)) else np.asarray(a, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] < 1:
        raise GraphRequestError(u"Expected a non-empty square matrix, got shape {}".format(data.shape))
    vector = np.ones(data.shape[0]) / np.sqrt(data.shape[0])
    estimate = 0.0
    for __ in range(iterations):
        product = data.dot(vector)
        norm = np.linalg.norm(product)
        if norm == 0.0:
            return 0.0
        estimate = norm
        vector = product / norm
    return estimate


class VideoGraphs(object):
    """
    The two renormalized operators of one video.

    Both are built on first access and cached, since a cleaner visits
    the same video once per epoch.
    """

    def __init__(self, features, config=None):
        self.features = as_feature_matrix(features)
        self.config = config or GraphConfig()

    @property
    def n_snippets(self):
        return self.features.shape[0]

    @lazy
    def feature(self):
        if self.config.feature_constant is not None:
            adjacency = build_constant(self.n_snippets, self.config.feature_constant)
        else:
            adjacency = build_feature_similarity(self.features, symmetrize=self.config.symmetrize_similarity)
        return renormalize(adjacency)

    @lazy
    def temporal(self):
        if self.config.temporal_constant is not None:
            adjacency = build_constant(self.n_snippets, self.config.temporal_constant)
        else:
            adjacency = build_temporal_consistency(self.n_snippets)
        return renormalize(adjacency)

    def operator(self, branch):
        """
        Return the renormalized operator of `branch` ("feature" or "temporal").
        """
        if branch not in BRANCHES:
            raise GraphRequestError(u"Unknown graph branch '{}'".format(branch))
        return getattr(self, branch)
