"""Samplers for G(n, W).

``sample_graph_transversal`` is exact: instead of real points it draws the latent
state that the graph actually depends on, namely the interval of each point and,
inside layers 1..5, the vertex of A_i its subinterval belongs to. Vertex identities
are uniform integers in [0, |A_i|), so collisions (two points on one vertex of G_U)
happen with exactly the right probability. In layers >= 6 the collision probability
is below 2^-(2^2059) and is taken to be 0; adjacency from such a vertex to earlier
vertices is a fresh fair coin per vertex pair.
"""
from __future__ import annotations

import bisect
import hashlib
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constructions import (
    DiagonalBlock,
    IntervalPartition,
    KttMixture,
    TransversalStructure,
    TransversalUniform,
)
from .core import StepFunction
from .graphs import LabeledGraph
from .rng import RngStream

# Layers whose vertex identity is drawn explicitly; beyond this, collisions are dropped.
IDENTITY_LAYERS = TransversalStructure.is_materialized


@dataclass(frozen=True)
class SampledAssignment:
    """Latent state of a transversal sample.

    ``interval_of[v]`` is the 1-based interval of point v, ``class_of[v]`` the index of
    its G_U vertex among the distinct vertices hit inside that interval (dense, in
    order of first appearance), ``vertex_of[v]`` the vertex itself for layers <= 5
    (None beyond), and ``group_of`` maps each occupied interval to its group k.
    """

    interval_of: tuple[int, ...]
    class_of: tuple[int, ...]
    vertex_of: tuple[Optional[int], ...]
    group_of: dict

    @property
    def n(self) -> int:
        return len(self.interval_of)

    @property
    def layer_of_interval(self) -> dict:
        return self.group_of

    @property
    def image_size(self) -> int:
        """|Im(rho)|: number of distinct intervals hit."""
        return len(set(self.interval_of))

    def class_counts(self) -> dict[int, int]:
        """Occupied interval -> number of distinct vertex classes in it."""
        out: dict[int, int] = {}
        for i, c in zip(self.interval_of, self.class_of):
            out[i] = max(out.get(i, 0), c + 1)
        return out

    def to_json(self) -> dict:
        return {
            "interval_of": [str(i) if i >= 1 << 53 else i for i in self.interval_of],
            "class_of": list(self.class_of),
            "group_of": {str(i): k for i, k in sorted(self.group_of.items())},
        }


def geometric_half(rng: RngStream, size: int) -> np.ndarray:
    """Exact Pr[k] = 2^-k, k >= 1: one plus the number of trailing zero bits."""
    k = np.ones(size, dtype=np.int64)
    todo = np.arange(size)
    while todo.size:
        x = rng.gen.integers(0, 1 << 63, size=todo.size, dtype=np.int64)
        hit = x != 0
        low = x[hit] & -x[hit]
        k[todo[hit]] += np.log2(low.astype(np.float64)).astype(np.int64)
        k[todo[~hit]] += 63
        todo = todo[~hit]
    return k


def sample_intervals(n: int, partition: IntervalPartition, rng: RngStream) -> tuple[list[int], list[int]]:
    """Interval index and group of each of n i.i.d. uniform points."""
    if n == 0:
        return [], []
    if partition.dyadic:
        groups = geometric_half(rng, n)
    else:
        masses = [partition.group_mass(k) for k in range(1, partition.num_groups + 1)]
        den = math.lcm(*(m.denominator for m in masses))
        cum = np.cumsum([int(m * den) for m in masses]).tolist()
        draws = [rng.randbelow(den) for _ in range(n)]
        groups = np.array([bisect.bisect_right(cum, u) + 1 for u in draws], dtype=np.int64)
    intervals = [0] * n
    for k in np.unique(groups).tolist():
        where = np.flatnonzero(groups == k)
        g = partition.group_count(k)
        start = partition.group_start(k)
        if g <= 1 << 62:
            idx = rng.gen.integers(0, g, size=where.size).tolist()
        else:
            idx = [rng.randbelow(g) for _ in range(where.size)]
        for pos, j in zip(where.tolist(), idx):
            intervals[pos] = start + j + 1
    return intervals, groups.tolist()


def sample_transversal_assignment(
    n: int, partition: IntervalPartition, structure: TransversalStructure, rng: RngStream
) -> SampledAssignment:
    intervals, groups = sample_intervals(n, partition, rng)
    vertex_of: list[Optional[int]] = [None] * n
    class_of = [0] * n
    seen: dict[int, dict] = {}
    for v, i in enumerate(intervals):
        cls = seen.setdefault(i, {})
        if IDENTITY_LAYERS(i):
            w = rng.randbelow(structure.size(i))
            vertex_of[v] = w
            key = w
        else:
            key = ("point", v)
        if key not in cls:
            cls[key] = len(cls)
        class_of[v] = cls[key]
    group_of = {i: k for i, k in zip(intervals, groups)}
    return SampledAssignment(tuple(intervals), tuple(class_of), tuple(vertex_of), group_of)


def _class_table(a: SampledAssignment):
    """Distinct (interval, class) pairs sorted by interval, and the class index of each point."""
    keys = sorted(set(zip(a.interval_of, a.class_of)))
    index = {key: c for c, key in enumerate(keys)}
    point_class = np.array([index[key] for key in zip(a.interval_of, a.class_of)], dtype=np.int64)
    vertex = {}
    for key, w in zip(zip(a.interval_of, a.class_of), a.vertex_of):
        vertex[index[key]] = w
    return keys, point_class, vertex


def transversal_edges(a: SampledAssignment, rng: RngStream) -> LabeledGraph:
    """Draw the graph given the latent assignment."""
    if a.n == 0:
        return LabeledGraph.empty(0)
    keys, point_class, vertex = _class_table(a)
    k = len(keys)
    occupied = sorted(set(i for i, _ in keys))
    rank = np.array([bisect.bisect_left(occupied, i) for i, _ in keys])
    coins = rng.gen.integers(0, 2, size=(k, k)).astype(bool)
    upper = np.triu(coins, 1) & (rank[:, None] != rank[None, :])
    # Classes are sorted by interval, so for c < d the class d is the later one.
    for d, (j, _) in enumerate(keys):
        if not IDENTITY_LAYERS(j):
            break
        wd = vertex[d]
        for c in range(d):
            i = keys[c][0]
            if i != j:
                pos = TransversalStructure.prefix_count(i - 1) + vertex[c]
                upper[c, d] = bool(wd >> pos & 1)
    sym = upper | upper.T
    return LabeledGraph.from_matrix(sym[np.ix_(point_class, point_class)])


def sample_graph_transversal(
    n: int, partition: IntervalPartition, structure: TransversalStructure, rng: RngStream
) -> tuple[LabeledGraph, SampledAssignment]:
    a = sample_transversal_assignment(n, partition, structure, rng)
    return transversal_edges(a, rng), a


def sample_graph_diagonal_block(n: int, rng: RngStream) -> tuple[LabeledGraph, tuple[int, ...]]:
    """Interval i with probability 2^-i (no truncation); edge iff same interval."""
    intervals = geometric_half(rng, n)
    same = intervals[:, None] == intervals[None, :]
    np.fill_diagonal(same, False)
    return LabeledGraph.from_matrix(same), tuple(intervals.tolist())


def sample_graph_stepfunction(
    n: int, w: StepFunction, rng: RngStream
) -> tuple[LabeledGraph, tuple[int, ...]]:
    """Steps i.i.d. by measure, then each pair independently by the step-pair value."""
    if n == 0:
        return LabeledGraph.empty(0), ()
    p = np.array([float(m) for m in w.measures])
    steps = rng.gen.choice(w.q, size=n, p=p / p.sum())
    vals = w.to_matrix()[np.ix_(steps, steps)]
    u = rng.random((n, n))
    upper = np.triu(u < vals, 1)
    return LabeledGraph.from_matrix(upper | upper.T), tuple(int(s) for s in steps)


@dataclass(frozen=True)
class GeneralSample:
    graph: LabeledGraph
    points: tuple[float, ...]
    approximate: bool


def _hash_bit(*parts) -> int:
    h = hashlib.blake2b(repr(parts).encode(), digest_size=1).digest()
    return h[0] & 1


def transversal_point_value(w: TransversalUniform, x: float, y: float) -> int:
    part = w.partition
    i, j = part.locate(x), part.locate(y)
    if i == j:
        return 0
    if i > j:
        i, j, x, y = j, i, y, x

    def local_vertex(interval: int, point: float):
        frac = (point - float(part.interval_start(interval))) / float(part.interval_length(interval))
        size = TransversalStructure.size(interval)
        return min(int(frac * size), size - 1)

    # Layers 1..4 are resolvable at double precision (|A_4| = 2048).
    xi = local_vertex(i, x) if i <= 4 else ("x", x)
    if j <= 4:
        pos = TransversalStructure.prefix_count(i - 1) + xi
        return local_vertex(j, y) >> pos & 1
    return _hash_bit(i, xi, j, y)


def sample_graph_general(n: int, w, rng: RngStream) -> GeneralSample:
    """n uniform doubles and an edge ij with probability W(x_i, x_j).

    For transversal-uniform graphons this is only approximate (``approximate`` is
    set): doubles cannot address the subintervals of layers >= 5.
    """
    points = rng.random(n).tolist()
    coins = rng.random((n, n))
    m = np.zeros((n, n), dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            if coins[a, b] < float(w.evaluate(points[a], points[b])):
                m[a, b] = m[b, a] = True
    return GeneralSample(LabeledGraph.from_matrix(m), tuple(points), isinstance(w, TransversalUniform))


def sample_graph(n: int, w, rng: RngStream) -> LabeledGraph:
    """Exact sample of G(n, W) for every supported graphon kind."""
    if isinstance(w, StepFunction):
        return sample_graph_stepfunction(n, w, rng)[0]
    if isinstance(w, KttMixture):
        return sample_graph_stepfunction(n, w.to_stepfunction(), rng)[0]
    if isinstance(w, DiagonalBlock):
        return sample_graph_diagonal_block(n, rng)[0]
    if isinstance(w, TransversalUniform):
        return sample_graph_transversal(n, w.partition, w.structure, rng)[0]
    raise TypeError(f"no sampler for {type(w).__name__}")


def sample_with_latent(n: int, w, rng: RngStream) -> tuple[LabeledGraph, dict]:
    """Sample plus a JSON-ready description of the latent state."""
    if isinstance(w, TransversalUniform):
        g, a = sample_graph_transversal(n, w.partition, w.structure, rng)
        return g, a.to_json()
    if isinstance(w, DiagonalBlock):
        g, iv = sample_graph_diagonal_block(n, rng)
        return g, {"interval_of": list(iv)}
    step = w if isinstance(w, StepFunction) else w.to_stepfunction()
    g, steps = sample_graph_stepfunction(n, step, rng)
    return g, {"step_of": list(steps)}
