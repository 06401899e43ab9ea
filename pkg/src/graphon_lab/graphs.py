"""Finite simple graphs and bigraphs on bitset adjacency.

Vertices are 0-based internally; the text formats are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Sequence

import numpy as np


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def pair_index(n: int) -> list[tuple[int, int]]:
    """Pairs (i, j), i < j, in the order used by graph codes."""
    return list(combinations(range(n), 2))


@dataclass(frozen=True)
class LabeledGraph:
    """Simple graph on vertex set {0, ..., n-1}; ``adj[v]`` is a neighbor bitmask."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise ValueError("adjacency length must equal n >= 0")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError(f"vertex {v} has a neighbor outside [0, {self.n})")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> LabeledGraph:
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def from_matrix(cls, matrix) -> LabeledGraph:
        a = np.asarray(matrix, dtype=bool)
        n = a.shape[0]
        rows = []
        for v in range(n):
            packed = np.packbits(a[v], bitorder="little")
            rows.append(int.from_bytes(packed.tobytes(), "little"))
        return cls(n, tuple(rows))

    @classmethod
    def from_code(cls, n: int, code: int) -> LabeledGraph:
        return cls.from_edges(n, (p for e, p in enumerate(pair_index(n)) if code >> e & 1))

    @classmethod
    def empty(cls, n: int) -> LabeledGraph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> LabeledGraph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def path(cls, n: int) -> LabeledGraph:
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> LabeledGraph:
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def disjoint_cliques(cls, sizes: Sequence[int]) -> LabeledGraph:
        edges, start = [], 0
        for s in sizes:
            edges.extend(combinations(range(start, start + s), 2))
            start += s
        return cls.from_edges(start, edges)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u]) if u < v]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def complement(self) -> LabeledGraph:
        full = (1 << self.n) - 1
        return LabeledGraph(self.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(self.adj)))

    def induced(self, vertices: Sequence[int]) -> LabeledGraph:
        """Induced subgraph, relabelled so that ``vertices[i]`` becomes ``i``."""
        pos = {v: i for i, v in enumerate(vertices)}
        if len(pos) != len(vertices):
            raise ValueError("repeated vertex")
        return LabeledGraph.from_edges(
            len(vertices),
            ((pos[u], pos[v]) for u, v in combinations(vertices, 2) if self.has_edge(u, v)),
        )

    def relabel(self, perm: Sequence[int]) -> LabeledGraph:
        """Graph with edge perm[u]perm[v] for every edge uv."""
        return LabeledGraph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def code(self) -> int:
        """Bitmask over ``pair_index(n)``; a bijection between graphs on [n] and integers."""
        c = 0
        for e, (u, v) in enumerate(pair_index(self.n)):
            if self.adj[u] >> v & 1:
                c |= 1 << e
        return c

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges():
            m[u, v] = m[v, u] = True
        return m

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def to_text(self) -> str:
        lines = [f"{self.n} {self.num_edges}"]
        lines += [f"{u + 1} {v + 1}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def to_line(self) -> str:
        """Single-line form of the text format: ``n m u1 v1 u2 v2 ...``."""
        tokens = [str(self.n), str(self.num_edges)]
        for u, v in self.edges():
            tokens += [str(u + 1), str(v + 1)]
        return " ".join(tokens)

    @classmethod
    def from_text(cls, text: str) -> LabeledGraph:
        tokens = [int(t) for t in text.split()]
        if len(tokens) < 2:
            raise ValueError("graph text needs a header 'n m'")
        n, m = tokens[0], tokens[1]
        rest = tokens[2:]
        if len(rest) != 2 * m:
            raise ValueError(f"expected {m} edges, found {len(rest) / 2:g}")
        return cls.from_edges(n, ((rest[2 * i] - 1, rest[2 * i + 1] - 1) for i in range(m)))


@dataclass(frozen=True)
class Bigraph:
    """Triple (U1, U2, E) with U1 = [m1], U2 = [m2] (0-based) and E a subset of U1 x U2."""

    m1: int
    m2: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise ValueError("side sizes must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < self.m1 and 0 <= v < self.m2):
                raise ValueError(f"edge ({u}, {v}) out of bounds")

    @classmethod
    def from_edges(cls, m1: int, m2: int, edges: Iterable[tuple[int, int]]) -> Bigraph:
        return cls(m1, m2, frozenset(edges))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def right_neighborhood(self, v: int) -> frozenset[int]:
        return frozenset(u for u, w in self.edges if w == v)

    def left_neighborhood(self, u: int) -> frozenset[int]:
        return frozenset(v for w, v in self.edges if w == u)

    def associated_graph(self) -> LabeledGraph:
        """Graph on m1 + m2 vertices: left u is vertex u, right v is vertex m1 + v."""
        return LabeledGraph.from_edges(self.m1 + self.m2, ((u, self.m1 + v) for u, v in self.edges))

    def to_text(self) -> str:
        lines = [f"{self.m1} {self.m2} {len(self.edges)}"]
        lines += [f"{u + 1} {v + 1}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Bigraph:
        tokens = [int(t) for t in text.split()]
        if len(tokens) < 3:
            raise ValueError("bigraph text needs a header 'm1 m2 e'")
        m1, m2, e = tokens[:3]
        rest = tokens[3:]
        if len(rest) != 2 * e:
            raise ValueError(f"expected {e} edges, found {len(rest) / 2:g}")
        return cls.from_edges(m1, m2, ((rest[2 * i] - 1, rest[2 * i + 1] - 1) for i in range(e)))


def _refined_cells(g: LabeledGraph) -> list[list[int]]:
    # Colour refinement with colours named by sorted signatures, so the cell order is
    # an isomorphism invariant.
    colors = [0] * g.n
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in _bits(g.adj[v]))))
            for v in range(g.n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        stable = len(ranks) == len(set(colors))
        colors = [ranks[s] for s in sigs]
        if stable:
            break
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    return [cells[c] for c in sorted(cells)]


def canonical_code(g: LabeledGraph) -> int:
    """Isomorphism-invariant integer: minimum graph code over refinement-compatible orderings."""
    n = g.n
    if n <= 1:
        return 0
    cells = _refined_cells(g)
    pairs = pair_index(n)
    best = None
    for choice in product(*(permutations(c) for c in cells)):
        order = [v for block in choice for v in block]
        code = 0
        for e, (i, j) in enumerate(pairs):
            if g.adj[order[i]] >> order[j] & 1:
                code |= 1 << e
        if best is None or code < best:
            best = code
    return best


def canonical_form(g: LabeledGraph) -> LabeledGraph:
    return LabeledGraph.from_code(g.n, canonical_code(g))


def all_graphs(n: int) -> Iterator[LabeledGraph]:
    """Every labelled graph on [n], in code order."""
    for code in range(1 << (n * (n - 1) // 2)):
        yield LabeledGraph.from_code(n, code)
