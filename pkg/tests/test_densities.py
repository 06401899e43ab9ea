import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from graphon_lab.constructions import bigraph_B, diagonal_block_graphon, ktt_mixture_graphon
from graphon_lab.core import StepFunction, graph_to_stepfunction
from graphon_lab.densities import (
    InfeasibleError,
    bigraph_density,
    contains_induced_subbigraph,
    hom_density,
    induced_density,
    induced_density_graphon,
    induced_density_positive,
    is_ktt_free,
    largest_homogeneous_set,
)
from graphon_lab.graphs import Bigraph, LabeledGraph, all_graphs, pair_index
from graphon_lab.rng import RngStream

from test_core import exact_steps
from test_graphs import graphs

K1, K2, K3 = LabeledGraph.complete(1), LabeledGraph.complete(2), LabeledGraph.complete(3)
P3 = LabeledGraph.path(3)


def _over_assignments(w, k, factor):
    # oracle: explicit sum over all step tuples
    total = Fraction(0)
    for steps in itertools.product(range(w.q), repeat=k):
        term = math.prod(Fraction(w.measures[s]) for s in steps)
        total += term * factor(steps)
    return total


def _induced_oracle(h, w):
    def f(steps):
        out = Fraction(1)
        for u, v in pair_index(h.n):
            x = Fraction(w.values[steps[u]][steps[v]])
            out *= x if h.has_edge(u, v) else 1 - x
        return out

    return _over_assignments(w, h.n, f)


def _bigraph_oracle(b, w):
    def f(steps):
        out = Fraction(1)
        for u in range(b.m1):
            for v in range(b.m2):
                x = Fraction(w.values[steps[u]][steps[b.m1 + v]])
                out *= x if b.has_edge(u, v) else 1 - x
        return out

    return _over_assignments(w, b.m1 + b.m2, f)


def test_hom_density_examples():
    assert hom_density(K1, LabeledGraph.cycle(5)).value == 1
    assert hom_density(K2, K3).value == Fraction(2, 3)
    assert hom_density(K2, LabeledGraph.empty(4)).value == 0
    with pytest.raises(ValueError):
        hom_density(K2, LabeledGraph.empty(0))


def test_hom_density_allows_larger_patterns():
    # non-injective maps: K_2 -> K_2 maps of P_3 are the 2 proper colourings
    assert hom_density(P3, K2).value == Fraction(2, 8)


def test_induced_density_examples():
    assert induced_density(K2, K3).value == 1
    assert induced_density(K2, P3).value == Fraction(2, 3)
    assert induced_density(K1, LabeledGraph.cycle(4)).value == 1
    with pytest.raises(ValueError):
        induced_density(K3, K2)


@given(graphs(max_n=3), graphs(max_n=5))
def test_counts_against_brute_force(h, g):
    homs = sum(
        all(g.has_edge(f[u], f[v]) for u, v in h.edges()) for f in itertools.product(range(g.n), repeat=h.n)
    )
    assert hom_density(h, g).value == Fraction(homs, g.n**h.n)
    if h.n <= g.n:
        emb = sum(
            all(g.has_edge(f[u], f[v]) == h.has_edge(u, v) for u, v in pair_index(h.n))
            for f in itertools.permutations(range(g.n), h.n)
        )
        assert induced_density(h, g).value == Fraction(emb, math.perm(g.n, h.n))


def test_induced_density_graphon_examples():
    p = Fraction(3, 7)
    assert induced_density_graphon(K2, StepFunction.constant(p)).value == p
    assert induced_density_graphon(K2, StepFunction.equal_steps(((1, 0), (0, 1)))).value == Fraction(1, 2)


@given(exact_steps(max_q=4))
def test_induced_densities_normalise(w):
    for n in (1, 2, 3):
        assert sum(induced_density_graphon(h, w).value for h in all_graphs(n)) == 1


@given(graphs(max_n=3), exact_steps(max_q=3))
def test_induced_density_graphon_against_oracle(h, w):
    assert induced_density_graphon(h, w, mode="exact").value == _induced_oracle(h, w)


@given(graphs(max_n=3), graphs(max_n=4))
def test_graph_as_graphon_matches_map_counting(h, g):
    # p(H; W_G) counts all maps V(H) -> V(G), not only injective ones
    maps = sum(
        all(g.has_edge(f[u], f[v]) == h.has_edge(u, v) for u, v in pair_index(h.n))
        for f in itertools.product(range(g.n), repeat=h.n)
    )
    assert induced_density_graphon(h, graph_to_stepfunction(g)).value == Fraction(maps, g.n**h.n)


def test_bigraph_density_examples():
    p = Fraction(2, 5)
    edge = Bigraph.from_edges(1, 1, [(0, 0)])
    blank = Bigraph.from_edges(1, 1, [])
    assert bigraph_density(edge, StepFunction.constant(p)).value == p
    assert bigraph_density(blank, StepFunction.constant(p)).value == 1 - p
    # graphs go through W_G
    assert bigraph_density(edge, K3).value == Fraction(6, 9)


@given(exact_steps(max_q=3), st.integers(0, 15))
def test_bigraph_density_against_oracle(w, code):
    edges = [(u, v) for u in range(2) for v in range(2) if code >> (2 * u + v) & 1]
    b = Bigraph.from_edges(2, 2, edges)
    assert bigraph_density(b, w).value == _bigraph_oracle(b, w)


def test_bigraph_density_mc_within_three_stderr():
    w = StepFunction((Fraction(1, 3), Fraction(2, 3)), ((Fraction(4, 5), Fraction(1, 5)), (Fraction(1, 5), Fraction(1, 2))))
    b = Bigraph.from_edges(2, 2, [(0, 0), (1, 1), (0, 1)])
    exact = float(bigraph_density(b, w, mode="exact").value)
    mc = bigraph_density(b, w, mode="mc", trials=50000, rng=RngStream(12))
    assert mc.mode == "mc" and abs(mc.value - exact) <= 3 * mc.stderr


def test_bigraph_density_on_sampled_graphons():
    edge = Bigraph.from_edges(1, 1, [(0, 0)])
    mc = bigraph_density(edge, diagonal_block_graphon(40), trials=20000, rng=RngStream(3))
    # two independent points share an interval with probability sum 4^-i = 1/3
    assert abs(mc.value - 1 / 3) <= 3 * mc.stderr
    with pytest.raises(ValueError):
        bigraph_density(edge, diagonal_block_graphon(40))


def test_mixture_bigraph_density_is_zero():
    w = ktt_mixture_graphon(2, 5)
    assert bigraph_density(bigraph_B(2), w, mode="exact").value == 0
    assert bigraph_density(bigraph_B(1), w, mode="exact").value > 0


def test_positivity_witness():
    w = StepFunction.equal_steps(((0, 1), (1, 0)))
    assert induced_density_positive(K2, w)
    assert not induced_density_positive(K3, w)


def _contains_oracle(g, b):
    for s in itertools.permutations(range(g.n), b.m1):
        for t in itertools.permutations(range(g.n), b.m2):
            if all(g.has_edge(s[u], t[v]) == b.has_edge(u, v) for u in range(b.m1) for v in range(b.m2)):
                return True
    return False


def test_contains_induced_subbigraph_examples():
    edge = Bigraph.from_edges(1, 1, [(0, 0)])
    assert contains_induced_subbigraph(K2, edge)
    assert not contains_induced_subbigraph(K2, Bigraph.from_edges(3, 1, []))
    p4 = LabeledGraph.path(4)
    assert contains_induced_subbigraph(p4, bigraph_B(1)) == _contains_oracle(p4, bigraph_B(1))
    with pytest.raises(InfeasibleError):
        contains_induced_subbigraph(LabeledGraph.empty(40), bigraph_B(3))


@given(graphs(max_n=5), st.integers(1, 2), st.integers(1, 2), st.integers(0, 15))
def test_contains_against_oracle_and_density(g, m1, m2, code):
    edges = [(u, v) for u in range(m1) for v in range(m2) if code >> (2 * u + v) & 1]
    b = Bigraph.from_edges(m1, m2, edges)
    found = contains_induced_subbigraph(g, b)
    assert found == _contains_oracle(g, b)
    if found:
        assert bigraph_density(b, g).value > 0


def _homogeneous_oracle(g):
    best = 0
    for mask in range(1 << g.n):
        vs = [v for v in range(g.n) if mask >> v & 1]
        pairs = [g.has_edge(u, v) for u, v in itertools.combinations(vs, 2)]
        if all(pairs) or not any(pairs):
            best = max(best, len(vs))
    return best


def test_largest_homogeneous_set_examples():
    assert largest_homogeneous_set(LabeledGraph.complete(6)) == 6
    assert largest_homogeneous_set(LabeledGraph.cycle(5)) == 2
    for n in (2, 3, 4):
        assert largest_homogeneous_set(LabeledGraph.disjoint_cliques([n] * n)) == n
    with pytest.raises(InfeasibleError):
        largest_homogeneous_set(LabeledGraph.empty(41))


@given(graphs(max_n=8))
def test_largest_homogeneous_set_against_oracle(g):
    assert largest_homogeneous_set(g) == _homogeneous_oracle(g)


def test_is_ktt_free_examples():
    assert not is_ktt_free(LabeledGraph.cycle(4), 2)
    assert is_ktt_free(K3, 2)
    assert is_ktt_free(LabeledGraph.empty(5), 1) and not is_ktt_free(K2, 1)


@given(graphs(max_n=6))
def test_is_k22_free_against_oracle(g):
    import test_constructions

    assert is_ktt_free(g, 2) == (not test_constructions._has_k22(g))
