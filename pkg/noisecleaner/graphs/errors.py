"""
Errors raised while building graph operators.
"""
from noisecleaner.errors import NoiseCleanerError


class GraphError(NoiseCleanerError):
    """Generic graph construction error."""
    pass


class GraphRequestError(GraphError):
    """Error indicating invalid input to a graph builder.

    Raised for non-finite features, negative adjacency entries, empty
    graphs and constant values outside (0, 1].

    """
    pass
