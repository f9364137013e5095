"""Exact shortest-path oracle under up to f edge failures, with path recovery."""

from .graph import INF, Graph, GraphFormatError, generate_random_graph, load_graph, make_graph
from .maximisers import MaximiserStore, MaxKey
from .oracle import FaultTolerantOracle, QueryResult
from .pathform import EMPTY, PathForm

__all__ = [
    "EMPTY",
    "INF",
    "FaultTolerantOracle",
    "Graph",
    "GraphFormatError",
    "MaxKey",
    "MaximiserStore",
    "PathForm",
    "QueryResult",
    "generate_random_graph",
    "load_graph",
    "make_graph",
]
