import itertools

import pytest
from hypothesis import settings

from graphon_lab.graphs import LabeledGraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_isomorphic(g: LabeledGraph, h: LabeledGraph) -> bool:
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    return any(g.relabel(p) == h for p in itertools.permutations(range(g.n)))


@pytest.fixture
def small_graphs():
    return [
        LabeledGraph.empty(3),
        LabeledGraph.complete(4),
        LabeledGraph.path(4),
        LabeledGraph.cycle(5),
        LabeledGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)]),
    ]
