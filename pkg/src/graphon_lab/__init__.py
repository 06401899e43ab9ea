"""Graphons, samplers for G(n, W), pattern densities and entropy of random graphs."""
from .core import StepFunction, binary_entropy, delta1_upper, graph_to_stepfunction, graphon_entropy, l1_distance
from .graphs import Bigraph, LabeledGraph
from .rng import RngStream

__all__ = [
    "Bigraph",
    "LabeledGraph",
    "RngStream",
    "StepFunction",
    "binary_entropy",
    "delta1_upper",
    "graph_to_stepfunction",
    "graphon_entropy",
    "l1_distance",
]
__version__ = "0.1.0"
