import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from graphon_lab.constructions import IntervalPartition, alpha_partition, inverse_alpha, layer_sizes
from graphon_lab.core import StepFunction, binary_entropy, l1_distance
from graphon_lab.densities import induced_density_graphon
from graphon_lab.entropy import (
    GraphDistribution,
    JointDistribution,
    _layer_entropy,
    assignment_conditional_entropy,
    conditional_entropy,
    cross_class_pairs,
    diagonal_block_exact_entropy,
    diagonal_block_graph_distribution,
    diagonal_block_partition_probability,
    distinct_interval_probability,
    entropy_plugin_mm,
    exact_graph_distribution,
    shannon_entropy,
    transversal_entropy_lower_bound,
    tv_like_distance,
    unlabel_distribution,
)
from graphon_lab.graphs import LabeledGraph, all_graphs
from graphon_lab.rng import RngStream
from graphon_lab.sampling import sample_graph_diagonal_block, sample_transversal_assignment

from test_core import exact_steps

# Truncated sums over distinct interval indices (depth 28) on an explicit set-partition enumeration.
DIAGONAL_ORACLE = {2: 0.918295840445095, 3: 2.284476344786574, 4: 3.883372915687227}
COARSE = IntervalPartition.finite([(6, Fraction(1, 6))])


def test_exact_distribution_examples():
    d = exact_graph_distribution(2, StepFunction.constant(Fraction(1, 2)))
    assert d.probs == {0: Fraction(1, 2), 1: Fraction(1, 2)}
    d = exact_graph_distribution(2, StepFunction.equal_steps(((1, 0), (0, 1))))
    assert d.prob(LabeledGraph.complete(2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        exact_graph_distribution(9, StepFunction.constant(Fraction(1, 2)))


@given(exact_steps(max_q=3), st.integers(1, 4))
def test_exact_distribution_matches_induced_density(w, n):
    d = exact_graph_distribution(n, w)
    assert sum(d.probs.values()) == 1
    for h in all_graphs(n):
        assert d.prob(h) == induced_density_graphon(h, w, mode="exact").value


def test_random_free_fast_path_matches_general_path():
    w = StepFunction((Fraction(1, 5), Fraction(4, 5)), ((0, 1), (1, 1)))
    fast = exact_graph_distribution(4, w)
    for h in all_graphs(4):
        assert fast.prob(h) == induced_density_graphon(h, w, mode="exact").value


def test_shannon_entropy_examples():
    assert shannon_entropy([Fraction(1)]) == 0
    assert shannon_entropy([Fraction(1, 8)] * 8) == 3
    assert shannon_entropy({"a": Fraction(1, 3), "b": Fraction(2, 3)}) == pytest.approx(0.9182958, abs=1e-6)


def test_conditional_entropy_examples():
    indep = JointDistribution({(x, y): Fraction(1, 4) for x in (0, 1) for y in (0, 1)})
    assert conditional_entropy(indep) == pytest.approx(1.0)
    same = JointDistribution({(x, x): Fraction(1, 4) for x in range(4)})
    assert conditional_entropy(same) == 0
    bsc = JointDistribution({(x, y): Fraction(3, 8) if x == y else Fraction(1, 8) for x in (0, 1) for y in (0, 1)})
    assert conditional_entropy(bsc) == pytest.approx(binary_entropy(0.25))


@given(st.lists(st.integers(0, 6), min_size=6, max_size=6).filter(any))
def test_conditioning_reduces_entropy(weights):
    total = sum(weights)
    keys = [(x, y) for x in range(3) for y in range(2)]
    joint = JointDistribution({k: Fraction(w, total) for k, w in zip(keys, weights) if w})
    assert conditional_entropy(joint) <= shannon_entropy(joint.marginal_x()) + 1e-12


def test_plugin_entropy():
    assert entropy_plugin_mm(["a"] * 10) == 0
    assert entropy_plugin_mm(["a", "b"]) == pytest.approx(1 + 1 / (4 * math.log(2)))
    rng = RngStream(21)
    draws = rng.gen.integers(0, 8, size=100000).tolist()
    assert abs(entropy_plugin_mm(draws) - 3) < 0.01


def test_tv_like_distance():
    d = exact_graph_distribution(3, StepFunction.constant(Fraction(1, 3)))
    assert tv_like_distance(d, d) == 0
    empty = exact_graph_distribution(2, StepFunction.constant(0))
    full = exact_graph_distribution(2, StepFunction.constant(1))
    assert tv_like_distance(empty, full) == 2
    a = exact_graph_distribution(2, StepFunction.constant(Fraction(1, 2)))
    b = exact_graph_distribution(2, StepFunction.constant(Fraction(3, 5)))
    assert tv_like_distance(a, b) == Fraction(1, 5)
    with pytest.raises(ValueError):
        tv_like_distance(a, d)


@given(exact_steps(), exact_steps(), st.integers(1, 3))
def test_sampling_bound(w1, w2, n):
    mu1, mu2 = exact_graph_distribution(n, w1), exact_graph_distribution(n, w2)
    assert tv_like_distance(mu1, mu2) <= n * n * l1_distance(w1, w2)


def test_unlabel_distribution_examples():
    d2 = exact_graph_distribution(2, StepFunction.constant(Fraction(1, 3)))
    assert shannon_entropy(unlabel_distribution(d2)) == pytest.approx(shannon_entropy(d2))
    d3 = exact_graph_distribution(3, StepFunction.constant(Fraction(1, 2)))
    u = unlabel_distribution(d3)
    assert sorted(u.values()) == [Fraction(1, 8), Fraction(1, 8), Fraction(3, 8), Fraction(3, 8)]
    assert shannon_entropy(u) == pytest.approx(1.8112781, abs=1e-6)
    point = GraphDistribution(3, {0: Fraction(1)})
    assert shannon_entropy(unlabel_distribution(point)) == 0


def _layer_oracle(bits, distinct, earlier):
    # entropy of the projections of `distinct` distinct uniform bit strings onto `earlier` bits
    c = Counter(
        tuple(s & ((1 << earlier) - 1) for s in tup) for tup in itertools.permutations(range(1 << bits), distinct)
    )
    total = sum(c.values())
    return shannon_entropy([Fraction(v, total) for v in c.values()])


@pytest.mark.parametrize("layer", [2, 3])
def test_layer_entropy_against_enumeration(layer):
    bits = layer_sizes(5).cumulative[layer - 2]
    for distinct in range(1, min(4, 2**bits) + 1):
        for earlier in range(bits + 1):
            assert _layer_entropy(layer, distinct, earlier) == pytest.approx(_layer_oracle(bits, distinct, earlier), abs=1e-12)


def test_layer_entropy_single_vertex_and_large_layers():
    assert _layer_entropy(4, 1, 7) == pytest.approx(7)
    assert _layer_entropy(1, 1, 0) == 0
    assert _layer_entropy(9, 3, 5) == 15


def test_conditional_entropy_of_assignment_bounds():
    s = layer_sizes(5)
    for seed in range(300):
        for part in (COARSE, alpha_partition(inverse_alpha(), 2)):
            a = sample_transversal_assignment(1 + seed % 10, part, s, RngStream(seed))
            floor = math.comb(a.image_size, 2)
            h = assignment_conditional_entropy(a)
            assert floor - 1e-9 <= h <= cross_class_pairs(a) + 1e-9


def test_transversal_lower_bound_small_n():
    s = layer_sizes(5)
    est = transversal_entropy_lower_bound(1, COARSE, s, 10, RngStream(0))
    assert est.value == 0
    part = alpha_partition(inverse_alpha(), 6)
    p = distinct_interval_probability(part)
    est = transversal_entropy_lower_bound(2, part, s, 4000, RngStream(2))
    # one pair: its edge is a fair coin exactly when the two points sit in different intervals
    # (layer 1 holds a single vertex and is never split between two points)
    assert abs(est.value - p) <= 3 * max(est.stderr, 1e-3)
    assert est.image_pairs.mean <= est.value + 1e-12


def test_distinct_interval_probability_finite():
    assert distinct_interval_probability(COARSE) == pytest.approx(5 / 6)


def test_diagonal_partition_probabilities():
    assert diagonal_block_partition_probability([2]) == Fraction(1, 3)
    assert diagonal_block_partition_probability([1]) == 1
    assert diagonal_block_partition_probability([1, 1]) == Fraction(2, 3)
    # sum over distinct i, j of 4^-i 2^-j = (1/3)(1) - sum 8^-i
    assert diagonal_block_partition_probability([2, 1]) == Fraction(1, 3) - Fraction(1, 7)


def test_diagonal_entropy_against_frozen_oracle():
    assert diagonal_block_exact_entropy(1) == 0
    assert diagonal_block_exact_entropy(2) == pytest.approx(binary_entropy(Fraction(1, 3)), abs=1e-12)
    for n, v in DIAGONAL_ORACLE.items():
        assert diagonal_block_exact_entropy(n) == pytest.approx(v, abs=1e-7)
    for n in range(1, 10):
        assert diagonal_block_exact_entropy(n) <= 2 * n
    with pytest.raises(ValueError):
        diagonal_block_exact_entropy(10)


def test_diagonal_graph_distribution_matches_sampler():
    d = diagonal_block_graph_distribution(3)
    assert shannon_entropy(d) == pytest.approx(diagonal_block_exact_entropy(3))
    rng = RngStream(5)
    counts = Counter(sample_graph_diagonal_block(3, rng)[0].code() for _ in range(20000))
    for code, p in d.probs.items():
        assert abs(counts[code] / 20000 - float(p)) < 4 * math.sqrt(float(p) * (1 - float(p)) / 20000) + 1e-9


@given(exact_steps(max_q=3), st.integers(1, 4))
def test_unlabeled_sandwich(w, n):
    d = exact_graph_distribution(n, w)
    lab, unl = shannon_entropy(d), shannon_entropy(unlabel_distribution(d))
    assert lab - math.log2(math.factorial(n)) - 1e-9 <= unl <= lab + 1e-9


@given(st.sampled_from([Fraction(k, 10) for k in range(1, 10)]), st.integers(2, 5))
def test_constant_graphon_entropy_is_pairs_times_h(p, n):
    d = exact_graph_distribution(n, StepFunction.constant(p))
    assert shannon_entropy(d) == pytest.approx(math.comb(n, 2) * binary_entropy(p), abs=1e-9)
