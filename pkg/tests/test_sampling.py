import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from graphon_lab.constructions import (
    IntervalPartition,
    TransversalStructure,
    TransversalUniform,
    alpha_partition,
    diagonal_block_graphon,
    inverse_alpha,
    layer_sizes,
)
from graphon_lab.core import StepFunction
from graphon_lab.rng import RngStream, Tally
from graphon_lab.sampling import (
    geometric_half,
    sample_graph,
    sample_graph_diagonal_block,
    sample_graph_general,
    sample_graph_stepfunction,
    sample_intervals,
    sample_transversal_assignment,
    sample_with_latent,
    transversal_edges,
)

COARSE = IntervalPartition.finite([(6, Fraction(1, 6))])


def test_rng_streams_are_reproducible_and_distinct():
    a, b = RngStream(5).child(3), RngStream(5).child(3)
    assert a.random(4).tolist() == b.random(4).tolist()
    assert RngStream(5).child(4).random() != RngStream(5).child(3).random()
    r = RngStream(1)
    big = 3 * 2**70 + 1
    assert all(0 <= r.randbelow(big) < big for _ in range(50))
    with pytest.raises(ValueError):
        RngStream(-1)


def test_tally_merge():
    xs = [0.5, 1.0, 2.0, 4.0]
    a, b, whole = Tally(), Tally(), Tally()
    for i, x in enumerate(xs):
        (a if i < 2 else b).add(x)
        whole.add(x)
    m = a.merge(b)
    assert m.count == 4 and m.mean == pytest.approx(whole.mean) and m.stderr == pytest.approx(whole.stderr)


def test_geometric_half_distribution():
    k = geometric_half(RngStream(2), 200000)
    counts = [int((k == j).sum()) for j in range(1, 8)] + [int((k >= 8).sum())]
    expected = [200000 / 2**j for j in range(1, 8)] + [200000 / 2**7]
    assert chisquare(counts, expected).pvalue > 1e-3


def test_sample_intervals_finite_partition():
    iv, groups = sample_intervals(60000, COARSE, RngStream(3))
    counts = np.bincount(iv, minlength=7)[1:]
    assert chisquare(counts).pvalue > 1e-3 and set(groups) == {1}


def test_assignment_classes_and_determinism():
    part = alpha_partition(inverse_alpha(), 3)
    s = layer_sizes(5)
    a1 = sample_transversal_assignment(40, COARSE, s, RngStream(9))
    a2 = sample_transversal_assignment(40, COARSE, s, RngStream(9))
    assert a1 == a2
    # interval 1 has a single vertex, so all its points form one class
    ones = [c for i, c in zip(a1.interval_of, a1.class_of) if i == 1]
    assert set(ones) <= {0}
    # interval 2 has two vertices
    assert a1.class_counts().get(2, 0) <= 2
    g = sample_transversal_assignment(30, part, s, RngStream(1))
    assert g.n == 30 and 1 <= g.image_size <= 30


def test_same_class_points_are_twins_and_same_interval_is_independent():
    s = layer_sizes(5)
    for seed in range(20):
        rng = RngStream(seed)
        a = sample_transversal_assignment(12, COARSE, s, rng)
        g = transversal_edges(a, rng)
        for u in range(a.n):
            for v in range(a.n):
                if a.interval_of[u] == a.interval_of[v]:
                    assert not g.has_edge(u, v)
                    if a.class_of[u] == a.class_of[v] and u != v:
                        nu = set(g.neighbors(u)) - {v}
                        nv = set(g.neighbors(v)) - {u}
                        assert nu == nv


def test_layer_two_edge_to_layer_one_is_fair():
    # one point in interval 1 and one in interval 2: adjacency is bit 0 of the layer-2 vertex
    part = IntervalPartition.finite([(2, Fraction(1, 2))])
    s = layer_sizes(5)
    rng = RngStream(4)
    hits = total = 0
    for _ in range(4000):
        a = sample_transversal_assignment(2, part, s, rng)
        if a.image_size == 2:
            total += 1
            hits += transversal_edges(a, rng).has_edge(0, 1)
    assert abs(hits / total - 0.5) < 4 * math.sqrt(0.25 / total)


def test_stepfunction_sampler_edge_density():
    w = StepFunction((Fraction(1, 4), Fraction(3, 4)), ((1, Fraction(1, 5)), (Fraction(1, 5), 0)))
    exact = float(sum(w.measures[i] * w.measures[j] * w.values[i][j] for i in range(2) for j in range(2)))
    g, steps = sample_graph_stepfunction(400, w, RngStream(8))
    pairs = math.comb(400, 2)
    assert len(steps) == 400
    assert abs(g.num_edges / pairs - exact) < 0.02


def test_diagonal_block_sampler_is_union_of_cliques():
    g, iv = sample_graph_diagonal_block(50, RngStream(6))
    for u in range(50):
        for v in range(u + 1, 50):
            assert g.has_edge(u, v) == (iv[u] == iv[v])


def test_dispatch_and_latent():
    w = TransversalUniform(alpha_partition(inverse_alpha(), 2), layer_sizes(5))
    g = sample_graph(6, w, RngStream(1))
    assert g.n == 6
    g2, latent = sample_with_latent(6, w, RngStream(1))
    assert g2 == g and len(latent["interval_of"]) == 6
    assert sample_graph(5, diagonal_block_graphon(10), RngStream(2)).n == 5
    with pytest.raises(TypeError):
        sample_graph(3, object(), RngStream(0))


def test_general_sampler_flags_transversal_as_approximate():
    w = TransversalUniform(alpha_partition(inverse_alpha(), 2), layer_sizes(5))
    assert sample_graph_general(5, w, RngStream(0)).approximate
    step = StepFunction.constant(Fraction(1, 2))
    s = sample_graph_general(5, step, RngStream(0))
    assert not s.approximate and len(s.points) == 5


def _binomial_ok(hits, total, p):
    return abs(hits / total - p) <= 3 * math.sqrt(p * (1 - p) / total)


def test_stepfunction_sampler_examples():
    assert sample_graph_stepfunction(0, StepFunction.constant(Fraction(1, 2)), RngStream(0))[0].n == 0
    zero = StepFunction.constant(0)
    assert all(sample_graph_stepfunction(6, zero, RngStream(s))[0].num_edges == 0 for s in range(20))
    rng = RngStream(31)
    half = StepFunction.constant(Fraction(1, 2))
    hits = sum(sample_graph_stepfunction(2, half, rng)[0].num_edges for _ in range(10**5))
    assert _binomial_ok(hits, 10**5, 0.5)


def test_general_sampler_examples():
    from graphon_lab.core import graph_to_stepfunction
    from graphon_lab.graphs import LabeledGraph

    w = graph_to_stepfunction(LabeledGraph.complete(3))
    # distinct thirds always give a triangle; check via direct evaluation on fixed points
    assert all(w.evaluate(x, y) == 1 for x, y in [(0.1, 0.5), (0.5, 0.9), (0.1, 0.9)])
    one = StepFunction.constant(1)
    assert sample_graph_general(5, one, RngStream(3)).graph.num_edges == 10
    rng = RngStream(32)
    diag = diagonal_block_graphon(60)
    trials = 20000
    hits = sum(sample_graph_general(2, diag, rng).graph.num_edges for _ in range(trials))
    assert _binomial_ok(hits, trials, 1 / 3)


def test_transversal_examples():
    s = layer_sizes(5)
    part = alpha_partition(inverse_alpha(), 2)
    rng = RngStream(33)
    hits = total = 0
    while total < 20000:
        a = sample_transversal_assignment(2, part, s, rng)
        if a.image_size == 2:
            total += 1
            hits += transversal_edges(a, rng).num_edges
    assert _binomial_ok(hits, total, 0.5)
    # all points in interval 1 form one class
    one = IntervalPartition.finite([(1, Fraction(1))])
    a = sample_transversal_assignment(4, one, s, RngStream(0))
    assert a.class_of == (0, 0, 0, 0) and a.layer_of_interval == {1: 1}


def test_diagonal_block_pair_probability():
    rng = RngStream(34)
    trials = 10**5
    hits = sum(sample_graph_diagonal_block(2, rng)[0].num_edges for _ in range(trials))
    assert _binomial_ok(hits, trials, 1 / 3)
    assert sample_graph_diagonal_block(1, rng)[0].n == 1
