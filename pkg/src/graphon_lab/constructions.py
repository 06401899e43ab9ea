"""Graphs, bigraphs and graphons built from explicit recipes.

* ``fm_bigraph``: the bigraph ([m], [2^m]) whose right vertices realise every subset of [m].
* ``layer_sizes``: the layers A_i of the transversal-uniform graph, log2|A_i| = sum_{j<i} |A_j|.
* ``alpha_partition``: the interval partition driven by a decay schedule alpha(n) -> 0.
* ``diagonal_block_graphon``: 1 on the union of I_i x I_i with |I_i| = 2^-i, 0 elsewhere.
* ``ktt_mixture_graphon``: blocks carrying every K_{t,t}-free graph, zero between blocks.
* ``bigraph_B``: the connected, twin-free bigraph containing K_{t,t}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

from .core import StepFunction
from .graphs import Bigraph, LabeledGraph, canonical_code

# Layers 1..5 have |A_i| = 1, 2, 8, 2^11, 2^2059; from layer 6 on the size is a tower.
MATERIALIZED_LAYERS = 5


def fm_bigraph(m: int) -> Bigraph:
    """Right vertex j (0-based) is adjacent to left vertex b iff bit b of j is set."""
    if not 1 <= m <= 20:
        raise ValueError("fm_bigraph needs 1 <= m <= 20")
    edges = [(b, j) for j in range(1 << m) for b in range(m) if j >> b & 1]
    return Bigraph.from_edges(m, 1 << m, edges)


def _layer_table():
    sizes, cum = [1], [1]
    while len(sizes) < MATERIALIZED_LAYERS:
        sizes.append(1 << cum[-1])
        cum.append(cum[-1] + sizes[-1])
    return tuple(sizes), tuple(cum)


_SIZES, _CUM = _layer_table()


@dataclass(frozen=True)
class TransversalStructure:
    """Layer sizes |A_i| and cumulative counts G_i of the transversal-uniform graph.

    Layers up to ``MATERIALIZED_LAYERS`` are exact integers. ``log2_size(6)`` is the
    exact integer 2059 + 2^2059; from layer 7 on not even the exponent fits in memory.
    """

    depth: int
    sizes: tuple[int, ...] = field(init=False)
    cumulative: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        k = min(self.depth, MATERIALIZED_LAYERS)
        object.__setattr__(self, "sizes", _SIZES[:k])
        object.__setattr__(self, "cumulative", _CUM[:k])

    @staticmethod
    def is_materialized(i: int) -> bool:
        return 1 <= i <= MATERIALIZED_LAYERS

    @staticmethod
    def size(i: int) -> int:
        if not TransversalStructure.is_materialized(i):
            raise OverflowError(f"|A_{i}| is not materializable")
        return _SIZES[i - 1]

    @staticmethod
    def prefix_count(i: int) -> int:
        """G_i = |A_1| + ... + |A_i| (G_0 = 0)."""
        if i == 0:
            return 0
        if not TransversalStructure.is_materialized(i):
            raise OverflowError(f"G_{i} is not materializable")
        return _CUM[i - 1]

    @staticmethod
    def log2_size(i: int) -> int:
        if i < 1:
            raise ValueError("layers are 1-based")
        if i - 1 > MATERIALIZED_LAYERS:
            raise OverflowError(f"log2|A_{i}| = G_{i - 1} is not materializable")
        return TransversalStructure.prefix_count(i - 1)

    def describe(self) -> list[str]:
        out = []
        for i in range(1, self.depth + 1):
            if i <= MATERIALIZED_LAYERS:
                out.append(f"|A_{i}| = 2^{self.log2_size(i)}")
            elif i == MATERIALIZED_LAYERS + 1:
                out.append(f"|A_{i}| = 2^(2059 + 2^2059)")
            else:
                out.append(f"|A_{i}| = 2^G_{i - 1}")
        return out


def layer_sizes(depth: int) -> TransversalStructure:
    return TransversalStructure(depth)


@dataclass(frozen=True)
class AlphaSchedule:
    """A decay function alpha: N -> R_+ assumed to tend to 0.

    ``threshold_max`` needs to certify that {n : alpha(n) > thr} is finite. With
    ``monotone=True`` (alpha non-increasing) this is an exact doubling + bisection
    search up to ``eval_cap``; otherwise it is an exhaustive scan to ``eval_cap``,
    which is only a heuristic.
    """

    evaluator: Callable[[int], object]
    eval_cap: int = 1 << 256
    monotone: bool = False
    name: str = "alpha"

    def __call__(self, n: int):
        return self.evaluator(n)

    def threshold_max(self, thr) -> int:
        """max {n >= 1 : alpha(n) > thr}, or 0 if the set is empty."""
        if self.monotone:
            if not self(1) > thr:
                return 0
            hi = 1
            while self(hi) > thr:
                hi *= 2
                if hi > self.eval_cap:
                    raise ValueError(
                        f"{self.name}: alpha(n) > {thr} up to eval_cap; cannot certify finiteness"
                    )
            lo = hi // 2  # alpha(lo) > thr >= alpha(hi)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if self(mid) > thr:
                    lo = mid
                else:
                    hi = mid
            return lo
        if self.eval_cap > 10**7:
            raise ValueError(f"{self.name}: non-monotone schedules need eval_cap <= 10^7 to scan")
        best = 0
        for n in range(1, self.eval_cap + 1):
            if self(n) > thr:
                best = n
        if best == self.eval_cap:
            raise ValueError(f"{self.name}: alpha(eval_cap) > {thr}; cannot certify finiteness")
        return best


def inverse_alpha() -> AlphaSchedule:
    return AlphaSchedule(lambda n: Fraction(1, n), monotone=True, name="1/n")


def inverse_power_alpha(exponent) -> AlphaSchedule:
    e = Fraction(exponent)
    if e <= 0:
        raise ValueError("exponent must be positive")
    if e.denominator == 1:
        return AlphaSchedule(lambda n: Fraction(1, n ** e.numerator), monotone=True, name=f"n^-{e}")
    return AlphaSchedule(lambda n: n ** -float(e), monotone=True, name=f"n^-{e}")


def exponential_alpha(base: int = 2) -> AlphaSchedule:
    if base < 2:
        raise ValueError("base must be >= 2")
    return AlphaSchedule(lambda n: Fraction(1, base**n), monotone=True, name=f"{base}^-n")


class IntervalPartition:
    """Partition of [0, 1] into intervals I_1, I_2, ... grouped by common length.

    Group k holds g_k consecutive intervals of length beta_k, i.e. interval indices
    (G_{k-1}, G_k] with G_k = g_1 + ... + g_k.  Dyadic partitions (mass of group k
    exactly 2^-k) may be infinite and are extended lazily through ``count_fn``;
    finite partitions list their groups explicitly.
    """

    def __init__(
        self,
        counts: Sequence[int] = (),
        lengths: Optional[Sequence[Fraction]] = None,
        count_fn: Optional[Callable[[int], int]] = None,
        name: str = "partition",
        certified: bool = True,
    ):
        self.name = name
        self.certified = certified
        self._count_fn = count_fn
        self._counts = [int(c) for c in counts]
        if any(c < 1 for c in self._counts):
            raise ValueError("group counts must be positive")
        if lengths is None:
            self.dyadic = True
            self._lengths = [Fraction(1, g << (k + 1)) for k, g in enumerate(self._counts)]
        else:
            if count_fn is not None:
                raise ValueError("explicit lengths describe a finite partition")
            self.dyadic = False
            self._lengths = [Fraction(b) for b in lengths]
            if len(self._lengths) != len(self._counts) or any(b <= 0 for b in self._lengths):
                raise ValueError("need one positive length per group")
            if sum(g * b for g, b in zip(self._counts, self._lengths)) != 1:
                raise ValueError("group masses must sum to exactly 1")
        self._prefix = [0]
        for c in self._counts:
            self._prefix.append(self._prefix[-1] + c)

    @classmethod
    def finite(cls, groups: Sequence[tuple[int, Fraction]], name: str = "finite") -> IntervalPartition:
        return cls([g for g, _ in groups], [b for _, b in groups], name=name)

    @property
    def num_groups(self) -> Optional[int]:
        """Number of groups for finite partitions, None for infinite ones."""
        if self.dyadic and self._count_fn is not None:
            return None
        return len(self._counts)

    def _extend(self, k: int) -> None:
        while len(self._counts) < k:
            if self._count_fn is None:
                raise IndexError(f"{self.name} has only {len(self._counts)} groups")
            nk = len(self._counts) + 1
            g = int(self._count_fn(nk))
            self._counts.append(g)
            self._lengths.append(Fraction(1, g << nk))
            self._prefix.append(self._prefix[-1] + g)

    def group_count(self, k: int) -> int:
        self._extend(k)
        return self._counts[k - 1]

    def group_length(self, k: int) -> Fraction:
        self._extend(k)
        return self._lengths[k - 1]

    def group_mass(self, k: int) -> Fraction:
        return self.group_count(k) * self.group_length(k)

    def group_start(self, k: int) -> int:
        """G_{k-1}: intervals of group k are G_{k-1}+1, ..., G_k."""
        self._extend(k - 1)
        return self._prefix[k - 1]

    def groups(self, k_max: Optional[int] = None) -> list[tuple[int, Fraction]]:
        k_max = len(self._counts) if k_max is None else k_max
        self._extend(k_max)
        return list(zip(self._counts[:k_max], self._lengths[:k_max]))

    def group_of_interval(self, i: int) -> int:
        if i < 1:
            raise ValueError("intervals are 1-based")
        k = 1
        while self.group_start(k + 1) < i:
            k += 1
        return k

    def interval_length(self, i: int) -> Fraction:
        return self.group_length(self.group_of_interval(i))

    def interval_start(self, i: int) -> Fraction:
        k = self.group_of_interval(i)
        start = sum((self.group_mass(j) for j in range(1, k)), Fraction(0))
        return start + (i - 1 - self.group_start(k)) * self.group_length(k)

    def locate(self, x: float) -> int:
        """Interval containing the point x in [0, 1) (float resolution)."""
        lo, k = 0.0, 1
        while True:
            mass = float(self.group_mass(k))
            if x < lo + mass or (self.num_groups == k):
                j = int((x - lo) / float(self.group_length(k)))
                return self.group_start(k) + min(j, self.group_count(k) - 1) + 1
            lo += mass
            k += 1

    def to_dict(self) -> dict:
        return {"name": self.name, "groups": [[g, str(b)] for g, b in self.groups()]}


def alpha_partition(alpha: AlphaSchedule, k_max: int) -> IntervalPartition:
    """g_k = max({2^(k+5)} u {n : alpha(n) > 2^(-2k-9)}), beta = 1/(g_k 2^k).

    The first ``k_max`` groups are materialised now; later groups are computed on
    demand from the same rule, so samplers never run off the end.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    def count(k: int) -> int:
        return max(1 << (k + 5), alpha.threshold_max(Fraction(1, 1 << (2 * k + 9))))

    return IntervalPartition(
        [count(k) for k in range(1, k_max + 1)],
        count_fn=count,
        name=f"alpha={alpha.name}",
        certified=alpha.monotone,
    )


def quadratic_level(n: int, alpha: AlphaSchedule) -> int:
    """Largest k with 2^(k+4) <= n and alpha(n) <= 2^(-2k-7); 0 if there is none."""
    k = 0
    while (1 << (k + 5)) <= n and alpha(n) <= Fraction(1, 1 << (2 * (k + 1) + 7)):
        k += 1
    return k


def dyadic_partition(count_fn: Callable[[int], int], name: str) -> IntervalPartition:
    return IntervalPartition(count_fn=count_fn, name=name)


@dataclass(frozen=True)
class TransversalUniform:
    """Transversal-uniform graphon W_I: interval I_i is split evenly among the vertices of A_i."""

    partition: IntervalPartition
    structure: TransversalStructure
    random_free = True

    def evaluate(self, x: float, y: float) -> int:
        # Float points cannot address subintervals of layers >= 5, so adjacency there is
        # a deterministic hash of the two points: an approximation of W_I.
        from .sampling import transversal_point_value

        return transversal_point_value(self, x, y)


@dataclass(frozen=True)
class DiagonalBlock:
    """1 on the union of I_i x I_i with I_i = [1 - 2^(1-i), 1 - 2^-i), 0 elsewhere."""

    depth_cap: int
    random_free = True

    @staticmethod
    def interval_length(i: int) -> Fraction:
        return Fraction(1, 1 << i)

    @staticmethod
    def interval_of(x: float) -> int:
        if not 0 <= x < 1:
            raise ValueError("points must lie in [0, 1)")
        # 1 - x is exact for x >= 1/2; I_i is where 2^-i < 1 - x <= 2^(1-i).
        mant, exp = math.frexp(1.0 - x)
        return 1 - exp + (1 if mant == 0.5 else 0)

    def evaluate(self, x: float, y: float) -> int:
        return int(self.interval_of(x) == self.interval_of(y))

    def to_stepfunction(self, depth: Optional[int] = None) -> StepFunction:
        """Truncation: steps I_1..I_d plus a tail step on which the value is 0.

        The L1 error of the truncation is sum_{i>d} 4^-i = 4^-d / 3.
        """
        d = self.depth_cap if depth is None else depth
        measures = [Fraction(1, 1 << i) for i in range(1, d + 1)] + [Fraction(1, 1 << d)]
        q = d + 1
        values = [[int(i == j and i < d) for j in range(q)] for i in range(q)]
        return StepFunction(tuple(measures), tuple(tuple(r) for r in values))


def diagonal_block_graphon(depth_cap: int) -> DiagonalBlock:
    if depth_cap < 1:
        raise ValueError("depth_cap must be >= 1")
    return DiagonalBlock(depth_cap)


def ktt_free_graphs(t: int, n_max: int) -> list[LabeledGraph]:
    """All K_{t,t}-subgraph-free graphs on 1..n_max vertices up to isomorphism.

    Ordered by vertex count, then canonical code; each graph is returned in canonical
    labelling. Built by vertex extension, which is complete because the class is
    closed under deleting vertices.
    """
    from .densities import is_ktt_free

    if t < 1:
        raise ValueError("t must be >= 1")
    if not 1 <= n_max <= 7:
        raise ValueError("enumeration is limited to n_max <= 7")
    level = [LabeledGraph.empty(1)]
    out = list(level)
    for n in range(2, n_max + 1):
        found: dict[int, LabeledGraph] = {}
        for g in level:
            for mask in range(1 << (n - 1)):
                adj = list(g.adj) + [mask]
                for u in range(n - 1):
                    if mask >> u & 1:
                        adj[u] |= 1 << (n - 1)
                h = LabeledGraph(n, tuple(adj))
                if not is_ktt_free(h, t):
                    continue
                c = canonical_code(h)
                if c not in found:
                    found[c] = LabeledGraph.from_code(n, c)
        level = [found[c] for c in sorted(found)]
        out += level
    return out


@dataclass(frozen=True)
class KttMixture:
    """Zero between blocks S_i x S_j (i != j); a scaled copy of W_{H_i} on S_i x S_i."""

    t: int
    n_max: int
    graphs: tuple[LabeledGraph, ...]
    lengths: tuple[Fraction, ...]
    random_free = True

    def step_blocks(self) -> list[int]:
        """Block index of each step of ``to_stepfunction()``; -1 marks the zero remainder."""
        out = [i for i, g in enumerate(self.graphs) for _ in range(g.n)]
        if sum(self.lengths) < 1:
            out.append(-1)
        return out

    def to_stepfunction(self) -> StepFunction:
        return self._step

    @cached_property
    def _step(self) -> StepFunction:
        measures, owners = [], []
        for i, (g, length) in enumerate(zip(self.graphs, self.lengths)):
            for v in range(g.n):
                measures.append(length / g.n)
                owners.append((i, v))
        rest = 1 - sum(self.lengths)
        if rest > 0:
            measures.append(rest)
            owners.append((-1, 0))
        q = len(measures)
        values = [[0] * q for _ in range(q)]
        for a, (i, u) in enumerate(owners):
            for b, (j, v) in enumerate(owners):
                if i == j and i >= 0 and self.graphs[i].has_edge(u, v):
                    values[a][b] = 1
        return StepFunction(tuple(measures), tuple(tuple(r) for r in values))

    def evaluate(self, x: float, y: float) -> int:
        return int(self.to_stepfunction().evaluate(x, y))


def ktt_mixture_graphon(
    t: int, n_max: int, lengths: Optional[Sequence[Fraction]] = None
) -> KttMixture:
    """Mixture over all K_{t,t}-free graphs with at most n_max vertices.

    Default block lengths are 2^-i rescaled to sum to 1; explicit lengths may sum
    to less than 1, the remainder becoming an all-zero block.
    """
    if t < 2:
        raise ValueError("t must be >= 2")
    graphs = ktt_free_graphs(t, n_max)
    if lengths is None:
        raw = [Fraction(1, 1 << i) for i in range(1, len(graphs) + 1)]
        total = sum(raw)
        lengths = [r / total for r in raw]
    lengths = tuple(Fraction(x) for x in lengths)
    if len(lengths) != len(graphs):
        raise ValueError(f"need {len(graphs)} block lengths, got {len(lengths)}")
    if any(x <= 0 for x in lengths) or sum(lengths) > 1:
        raise ValueError("block lengths must be positive with sum <= 1")
    return KttMixture(t, n_max, tuple(graphs), lengths)


def bigraph_B(t: int) -> Bigraph:
    """Left V1 u U1, right V2 u U2 (each part of size t).

    Left indices: V1 = 0..t-1, U1 = t..2t-1. Right indices: V2 = 0..t-1, U2 = t..2t-1.
    V1 x V2 is complete; V1[i]-U2[i] and U1[i]-V2[i] are perfect matchings.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    edges = [(i, j) for i in range(t) for j in range(t)]
    edges += [(i, t + i) for i in range(t)]
    edges += [(t + i, i) for i in range(t)]
    return Bigraph.from_edges(2 * t, 2 * t, edges)
