"""Graph clustering by limited random walks."""

from .engine import LrwParams, SparseProbVector, WalkOutcome, explore
from .errors import GraphFormatError, LrwError, ParameterError
from .graph import Graph, load_edge_list, read_edge_list

__all__ = [
    "Graph",
    "GraphFormatError",
    "LrwError",
    "LrwParams",
    "ParameterError",
    "SparseProbVector",
    "WalkOutcome",
    "explore",
    "load_edge_list",
    "read_edge_list",
]

__version__ = "0.1.0"
