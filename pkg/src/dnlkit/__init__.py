"""Nets, clusterings, colorings and domination on tri-graphs, tri-hypergraphs and tournaments."""
__version__ = "0.1.0"

from .core import (Digraph, SetSystem, SimpleGraph, TriEdge, TriGraph, TriHypergraph,
                   TriTournament, disjointness_trigraph, from_json)
from .metric import PointCloud
from .tournament import TransitiveFamily, VoterProfile

__all__ = ["Digraph", "SetSystem", "SimpleGraph", "TriEdge", "TriGraph", "TriHypergraph",
           "TriTournament", "disjointness_trigraph", "from_json", "PointCloud",
           "TransitiveFamily", "VoterProfile", "__version__"]
