"""Homomorphism, induced and bigraph densities; homogeneous sets; K_{t,t}-freeness.

Exact graphon densities are sums over step assignments, computed by backtracking
in integer arithmetic (numerators over a common denominator) and returned as
``Fraction``. Branches where a factor vanishes are pruned, which is what makes
exact sums over {0,1}-valued step functions with many steps feasible.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Optional, Union

import numpy as np

from .constructions import KttMixture
from .core import StepFunction, graph_to_stepfunction
from .graphs import Bigraph, LabeledGraph, _bits
from .rng import RngStream, Tally

EXACT_STATE_LIMIT = 10**7
NODE_BUDGET = 10**7
SEARCH_LIMIT = 10**8


class InfeasibleError(ValueError):
    """The requested exact computation exceeds its size bound."""


@dataclass(frozen=True)
class DensityResult:
    value: Union[Fraction, float]
    mode: str
    stderr: Optional[float] = None
    samples: Optional[int] = None

    def to_json(self) -> dict:
        out = {"value": float(self.value), "mode": self.mode}
        if isinstance(self.value, Rational):
            out["exact"] = str(self.value)
        if self.stderr is not None:
            out["stderr"] = self.stderr
            out["samples"] = self.samples
        return out


def hom_density(h: LabeledGraph, g: LabeledGraph) -> DensityResult:
    """t(H; G): fraction of all maps V(H) -> V(G) sending edges to edges (non-edges are free)."""
    if g.n == 0:
        raise ValueError("target graph has no vertices")
    full = (1 << g.n) - 1
    order = _bfs_order(h.n, h.edges())
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in h.neighbors(v) if pos[u] < pos[v]] for v in order]
    img = [0] * h.n

    def rec(p: int) -> int:
        if p == h.n:
            return 1
        cand = full
        for q in back[p]:
            cand &= g.adj[img[q]]
        total = 0
        for s in _bits(cand):
            img[p] = s
            total += rec(p + 1)
        return total

    return DensityResult(Fraction(rec(0), g.n ** h.n), "exact")


def _bfs_order(k: int, edges) -> list[int]:
    nbrs = [[] for _ in range(k)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    order, seen = [], [False] * k
    for root in sorted(range(k), key=lambda v: -len(nbrs[v])):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in nbrs[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
    return order


def induced_density(h: LabeledGraph, g: LabeledGraph) -> DensityResult:
    """p(H; G): fraction of injective maps V(H) -> V(G) that induce exactly H."""
    if h.n > g.n:
        raise ValueError("pattern has more vertices than the target")
    order = _bfs_order(h.n, h.edges())
    pos = {v: i for i, v in enumerate(order)}
    cons = [
        [(pos[u], h.has_edge(u, v)) for u in range(h.n) if u != v and pos[u] < pos[v]]
        for v in order
    ]
    full = (1 << g.n) - 1
    img = [0] * h.n

    def rec(p: int, used: int) -> int:
        if p == h.n:
            return 1
        cand = full & ~used
        for q, want in cons[p]:
            a = g.adj[img[q]]
            cand &= a if want else ~a
        total = 0
        for s in _bits(cand):
            img[p] = s
            total += rec(p + 1, used | 1 << s)
        return total

    count = rec(0, 0)
    return DensityResult(Fraction(count, math.perm(g.n, h.n)), "exact")


class _IntStep:
    """Step function as integer numerators: m_s = a[s] / dm, w_st = b[s][t] / dw."""

    def __init__(self, w: StepFunction):
        w = w.exact()
        self.q = w.q
        self.dm = math.lcm(*(m.denominator for m in w.measures))
        self.dw = math.lcm(*(v.denominator for row in w.values for v in row))
        self.a = [int(m * self.dm) for m in w.measures]
        self.b = [[int(v * self.dw) for v in row] for row in w.values]
        self.pos = [sum(1 << t for t in range(self.q) if self.b[s][t] > 0) for s in range(self.q)]
        self.neg = [sum(1 << t for t in range(self.q) if self.b[s][t] < self.dw) for s in range(self.q)]
        self.random_free = all(v in (0, self.dw) for row in self.b for v in row)


def _pattern_sum(k: int, constraints, w: StepFunction, witness: bool = False, budget: int = NODE_BUDGET):
    """Sum over step assignments of vertices 0..k-1 of  prod m  *  prod over constraints.

    ``constraints`` are triples (u, v, want_edge) contributing W(s_u, s_v) or 1 - W.
    Returns a Fraction, or a bool in witness mode (is some term positive?).
    """
    iw = _IntStep(w)
    order = _bfs_order(k, [(u, v) for u, v, want in constraints if want])
    pos = {v: i for i, v in enumerate(order)}
    cons = [[] for _ in range(k)]
    for u, v, want in constraints:
        pu, pv = pos[u], pos[v]
        if pu > pv:
            pu, pv = pv, pu
        cons[pv].append((pu, want))
    full = (1 << iw.q) - 1
    assign = [0] * k
    nodes = 0
    a, b, dw = iw.a, iw.b, iw.dw

    class _Found(Exception):
        pass

    def rec(p: int, weight: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise InfeasibleError(f"exact sum exceeded {budget} search nodes")
        if p == k:
            if witness:
                raise _Found
            return weight
        cand = full
        cp = cons[p]
        for q, want in cp:
            cand &= iw.pos[assign[q]] if want else iw.neg[assign[q]]
        total = 0
        for s in _bits(cand):
            f = weight * a[s]
            for q, want in cp:
                x = b[assign[q]][s]
                f *= x if want else dw - x
            assign[p] = s
            total += rec(p + 1, f)
        return total

    try:
        num = rec(0, 1)
    except _Found:
        return True
    return False if witness else Fraction(num, iw.dm**k * iw.dw ** len(constraints))


def _graph_constraints(h: LabeledGraph):
    return [(u, v, h.has_edge(u, v)) for u, v in combinations(range(h.n), 2)]


def _bigraph_constraints(b: Bigraph):
    return [(u, b.m1 + v, b.has_edge(u, v)) for u in range(b.m1) for v in range(b.m2)]


def _exact_ok(w: StepFunction, k: int) -> bool:
    return w.q**k <= EXACT_STATE_LIMIT or all(v in (0, 1) for row in w.values for v in row)


def _mc_step(k: int, constraints, w: StepFunction, trials: int, rng: RngStream) -> DensityResult:
    p = np.array([float(m) for m in w.measures])
    mat = w.to_matrix()
    steps = rng.gen.choice(w.q, size=(trials, k), p=p / p.sum())
    prod = np.ones(trials)
    for u, v, want in constraints:
        x = mat[steps[:, u], steps[:, v]]
        prod *= x if want else 1 - x
    tally = Tally(trials, float(prod.sum()), float((prod**2).sum()))
    return DensityResult(tally.mean, "mc", tally.stderr, trials)


def _mc_sampled(k: int, constraints, w, trials: int, rng: RngStream) -> DensityResult:
    from .sampling import sample_graph

    tally = Tally()
    for t in range(trials):
        g = sample_graph(k, w, rng.child(t))
        tally.add(float(all(g.has_edge(u, v) == want for u, v, want in constraints)))
    return DensityResult(tally.mean, "mc", tally.stderr, trials)


def _as_step(w) -> Optional[StepFunction]:
    if isinstance(w, LabeledGraph):
        return graph_to_stepfunction(w)
    if isinstance(w, (StepFunction, KttMixture)):
        return w.to_stepfunction()
    return None


def _density(k, constraints, w, mode, trials, rng) -> DensityResult:
    step = _as_step(w)
    if mode not in ("auto", "exact", "mc"):
        raise ValueError(f"unknown mode {mode!r}")
    if step is not None and mode != "mc":
        if mode == "exact" or _exact_ok(step, k):
            try:
                return DensityResult(_pattern_sum(k, constraints, step), "exact")
            except InfeasibleError:
                if mode == "exact":
                    raise
    if rng is None:
        raise ValueError("Monte Carlo estimation needs an RngStream")
    if step is not None:
        return _mc_step(k, constraints, step, trials, rng)
    return _mc_sampled(k, constraints, w, trials, rng)


def induced_density_graphon(
    h: LabeledGraph, w, mode: str = "auto", trials: int = 10**5, rng: Optional[RngStream] = None
) -> DensityResult:
    """p(H; W) = E[prod_{uv in E} W(x_u, x_v) prod_{uv not in E} (1 - W(x_u, x_v))]."""
    return _density(h.n, _graph_constraints(h), w, mode, trials, rng)


def bigraph_density(
    b: Bigraph, w, mode: str = "auto", trials: int = 10**5, rng: Optional[RngStream] = None
) -> DensityResult:
    """p^b(B; W) with independent points for the left and right sides.

    Step functions (and graphs, via W_G) are summed exactly when feasible; the
    diagonal-block and transversal graphons are estimated from their exact samplers.
    """
    return _density(b.m1 + b.m2, _bigraph_constraints(b), w, mode, trials, rng)


def induced_density_positive(h: LabeledGraph, w: StepFunction) -> bool:
    """Whether p(H; W) > 0, by searching for one positive term."""
    return _pattern_sum(h.n, _graph_constraints(h), w.to_stepfunction(), witness=True)


def contains_induced_subbigraph(g: LabeledGraph, b: Bigraph) -> bool:
    """Whether injective maps U1 -> V(G), U2 -> V(G) (images may overlap) realise B exactly."""
    if b.m1 > g.n or b.m2 > g.n:
        return False
    if g.n ** (b.m1 + b.m2) > SEARCH_LIMIT:
        raise InfeasibleError(f"|V(G)|^(m1+m2) exceeds {SEARCH_LIMIT}")
    k = b.m1 + b.m2
    order = _bfs_order(k, [(u, b.m1 + v) for u, v in b.edges])
    pos = {v: i for i, v in enumerate(order)}
    side = [order[p] >= b.m1 for p in range(k)]
    cons = [[] for _ in range(k)]
    for u in range(b.m1):
        for v in range(b.m2):
            pu, pv = pos[u], pos[b.m1 + v]
            lo, hi = min(pu, pv), max(pu, pv)
            cons[hi].append((lo, b.has_edge(u, v)))
    full = (1 << g.n) - 1
    img = [0] * k

    def rec(p: int, used_left: int, used_right: int) -> bool:
        if p == k:
            return True
        cand = full & ~(used_right if side[p] else used_left)
        for q, want in cons[p]:
            a = g.adj[img[q]]
            cand &= a if want else ~a
        for s in _bits(cand):
            img[p] = s
            bit = 1 << s
            if rec(p + 1, used_left | (0 if side[p] else bit), used_right | (bit if side[p] else 0)):
                return True
        return False

    return rec(0, 0, 0)


def _color_sort(cand: int, adj) -> tuple[list[int], list[int]]:
    order, bounds, color = [], [], 0
    rest = cand
    while rest:
        color += 1
        q = rest
        while q:
            v = (q & -q).bit_length() - 1
            order.append(v)
            bounds.append(color)
            rest &= ~(1 << v)
            q &= ~(1 << v) & ~adj[v]
    return order, bounds


def max_clique_size(g: LabeledGraph) -> int:
    """Clique number by branch and bound with greedy-colouring bounds."""
    best = 0

    def expand(size: int, cand: int) -> None:
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        order, bounds = _color_sort(cand, g.adj)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best:
                return
            v = order[i]
            expand(size + 1, cand & g.adj[v])
            cand &= ~(1 << v)

    expand(0, (1 << g.n) - 1)
    return best


def largest_homogeneous_set(g: LabeledGraph) -> int:
    """max(clique number of G, clique number of its complement)."""
    if g.n > 40:
        raise InfeasibleError("largest_homogeneous_set is limited to 40 vertices")
    return max(max_clique_size(g), max_clique_size(g.complement()))


def is_ktt_free(g: LabeledGraph, t: int) -> bool:
    """No two disjoint t-sets S, T with all t^2 edges between them (subgraph, not induced)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if math.comb(g.n, t) > EXACT_STATE_LIMIT:
        raise InfeasibleError("too many t-subsets for brute force")
    for s in combinations(range(g.n), t):
        common = (1 << g.n) - 1
        for v in s:
            common &= g.adj[v]
            if common.bit_count() < t:
                break
        else:
            return False
    return True
