"""Exact laws of G(n, W) for small n and entropy quantities built on them.

Probabilities stay rational until an entropy is evaluated, so inequality checks
never fail from rounding in the law itself.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Hashable, Iterable, Mapping, Optional, Union

import numpy as np

from .constructions import IntervalPartition, TransversalStructure
from .core import StepFunction, binary_entropy
from .graphs import LabeledGraph, canonical_code, pair_index
from .rng import RngStream, Tally
from .sampling import SampledAssignment, sample_transversal_assignment

DISTRIBUTION_LIMIT = 10**8
UNLABEL_MAX_N = 6
DIAGONAL_MAX_N = 9
EXACT_TOL = 1e-9


@dataclass(frozen=True)
class GraphDistribution:
    """Law of a random graph on [n], keyed by ``LabeledGraph.code()``; zero entries omitted."""

    n: int
    probs: Mapping[int, Union[Fraction, float]]
    mode: str = "exact"

    def __post_init__(self):
        total = sum(self.probs.values())
        if self.mode == "exact" and all(isinstance(p, Fraction) for p in self.probs.values()):
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif abs(float(total) - 1) > EXACT_TOL:
            raise ValueError(f"probabilities sum to {float(total)}, not 1")
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")

    def support_size(self) -> int:
        return sum(1 for p in self.probs.values() if p > 0)

    def prob(self, g: LabeledGraph) -> Union[Fraction, float]:
        if g.n != self.n:
            raise ValueError("graph has the wrong vertex count")
        return self.probs.get(g.code(), Fraction(0))

    def entropy(self) -> float:
        return shannon_entropy(self)


@dataclass(frozen=True)
class JointDistribution:
    """Finite joint law of (X, Y) as {(x, y): probability}."""

    probs: Mapping[tuple[Hashable, Hashable], Fraction]

    def __post_init__(self):
        if sum(self.probs.values()) != 1:
            raise ValueError("joint probabilities must sum to exactly 1")
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")

    def marginal_x(self) -> dict:
        out: dict = {}
        for (x, _), p in self.probs.items():
            out[x] = out.get(x, 0) + p
        return out

    def marginal_y(self) -> dict:
        out: dict = {}
        for (_, y), p in self.probs.items():
            out[y] = out.get(y, 0) + p
        return out


def _psi(p) -> float:
    if p <= 0:
        return 0.0
    p = float(p)
    return -p * math.log2(p)


def shannon_entropy(dist) -> float:
    """-sum p log2 p (0 log 0 = 0) of a GraphDistribution, a mapping to probabilities, or a sequence of them."""
    if isinstance(dist, GraphDistribution):
        values = dist.probs.values()
    elif isinstance(dist, Mapping):
        values = dist.values()
    else:
        values = dist
    return math.fsum(_psi(p) for p in values)


def conditional_entropy(joint: JointDistribution) -> float:
    """Ent(X | Y) = sum over y of Pr[Y = y] Ent(X | Y = y)."""
    by_y: dict = {}
    for (x, y), p in joint.probs.items():
        by_y.setdefault(y, []).append(p)
    terms = []
    for ps in by_y.values():
        py = sum(ps)
        if py > 0:
            terms.append(float(py) * shannon_entropy([p / py for p in ps]))
    return math.fsum(terms)


def exact_graph_distribution(n: int, w: StepFunction) -> GraphDistribution:
    """Pr[G(n, W) = H] for every labeled H, summed exactly over step assignments."""
    w = w.to_stepfunction()
    pairs = pair_index(n)
    if w.q**n * 2 ** len(pairs) > DISTRIBUTION_LIMIT:
        raise ValueError(f"q^n * 2^C(n,2) exceeds {DISTRIBUTION_LIMIT}")
    w = w.exact()
    dm = math.lcm(*(m.denominator for m in w.measures))
    dw = math.lcm(*(v.denominator for row in w.values for v in row))
    a = [int(m * dm) for m in w.measures]
    b = [[int(v * dw) for v in row] for row in w.values]
    others = dw ** len(pairs)
    probs: dict[int, int] = {}
    if all(v in (0, dw) for row in b for v in row):
        # random-free: each assignment determines the graph
        for steps in product(range(w.q), repeat=n):
            weight = math.prod(a[s] for s in steps)
            code = sum(1 << e for e, (u, v) in enumerate(pairs) if b[steps[u]][steps[v]])
            probs[code] = probs.get(code, 0) + weight * others
    else:
        total = np.zeros(1 << len(pairs), dtype=object)
        for steps in product(range(w.q), repeat=n):
            vec = np.array([math.prod(a[s] for s in steps)], dtype=object)
            for u, v in pairs:
                x = b[steps[u]][steps[v]]
                # bit e of the index is the indicator of pair e
                vec = np.kron(np.array([dw - x, x], dtype=object), vec)
            total += vec
        probs = {code: int(p) for code, p in enumerate(total) if p}
    den = dm**n * others
    return GraphDistribution(n, {c: Fraction(p, den) for c, p in probs.items()})


def empirical_distribution(n: int, samples: Iterable[LabeledGraph]) -> GraphDistribution:
    counts = Counter(g.code() for g in samples)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("need at least one sample")
    return GraphDistribution(n, {c: k / total for c, k in counts.items()}, mode="estimated")


def entropy_plugin_mm(samples: Iterable[Hashable]) -> float:
    """Plug-in entropy plus the Miller-Madow correction (K - 1) / (2 N ln 2).

    Still biased low when the support is poorly sampled; use as a diagnostic only.
    """
    counts = Counter(samples)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("need at least one sample")
    plug = shannon_entropy([k / total for k in counts.values()])
    return plug + (len(counts) - 1) / (2 * total * math.log(2))


def tv_like_distance(d1: GraphDistribution, d2: GraphDistribution):
    """sum over H of |d1(H) - d2(H)|, so disjoint point masses are at distance 2."""
    if d1.n != d2.n:
        raise ValueError("distributions are over graphs of different orders")
    keys = set(d1.probs) | set(d2.probs)
    return sum(abs(d1.probs.get(k, 0) - d2.probs.get(k, 0)) for k in keys)


def unlabel_distribution(d: GraphDistribution) -> dict[int, Union[Fraction, float]]:
    """Law of the isomorphism class, keyed by canonical code."""
    if d.n > UNLABEL_MAX_N:
        raise ValueError(f"unlabeling is limited to n <= {UNLABEL_MAX_N}")
    out: dict[int, Union[Fraction, float]] = {}
    for code, p in d.probs.items():
        key = canonical_code(LabeledGraph.from_code(d.n, code))
        out[key] = out.get(key, 0) + p
    return out


# Transversal-uniform conditional entropy


@lru_cache(maxsize=None)
def _layer_entropy(layer: int, distinct: int, earlier: int) -> float:
    """Entropy of the adjacency of ``distinct`` uniformly chosen distinct vertices of
    layer ``layer`` towards ``earlier`` fixed distinct vertices of earlier layers.

    Each vertex of the layer is one bit pattern over all earlier vertices, every
    pattern occurring once. The chain rule over the draws gives a hypergeometric sum.
    For layers >= 5 the patterns are so numerous that the draws are independent up
    to a deficit below 2^-2000, and the value is taken as distinct * earlier.
    """
    if distinct == 0 or earlier == 0:
        return 0.0
    if layer >= 5:
        return float(distinct * earlier)
    total_bits = TransversalStructure.prefix_count(layer - 1)
    population = 1 << total_bits
    per_pattern = 1 << (total_bits - earlier)
    patterns = 1 << earlier
    h = 0.0
    for t in range(distinct):
        left = population - t
        acc = 0.0
        for hits in range(0, min(t, per_pattern) + 1):
            pr = math.comb(per_pattern, hits) * math.comb(population - per_pattern, t - hits)
            if pr:
                acc += pr / math.comb(population, t) * _psi(Fraction(per_pattern - hits, left))
        h += patterns * acc
    return h


def _interval_classes(a: SampledAssignment) -> list[tuple[int, int]]:
    counts = a.class_counts()
    return sorted(counts.items())


def assignment_conditional_entropy(a: SampledAssignment) -> float:
    """Ent(G | intervals and vertex classes of the points), exact up to the layer >= 5 deficit."""
    total, earlier = 0.0, 0
    for interval, r in _interval_classes(a):
        total += _layer_entropy(interval, r, earlier)
        earlier += r
    return total


def cross_class_pairs(a: SampledAssignment) -> int:
    """Number of vertex-class pairs lying in different intervals."""
    rs = [r for _, r in _interval_classes(a)]
    big = sum(rs)
    return math.comb(big, 2) - sum(math.comb(r, 2) for r in rs)


@dataclass
class LowerBoundEstimate:
    """Monte Carlo means over sampled assignments (stderr from the per-trial spread)."""

    n: int
    trials: int
    conditional_entropy: Tally = field(default_factory=Tally)
    cross_pairs: Tally = field(default_factory=Tally)
    image_pairs: Tally = field(default_factory=Tally)

    @property
    def value(self) -> float:
        return self.conditional_entropy.mean

    @property
    def stderr(self) -> float:
        return self.conditional_entropy.stderr


def transversal_entropy_lower_bound(
    n: int,
    partition: IntervalPartition,
    structure: TransversalStructure,
    trials: int,
    rng: RngStream,
) -> LowerBoundEstimate:
    """Estimate E[Ent(G | assignment)] <= Ent(G(n, W)), plus E[cross pairs] and E[C(|Im|, 2)].

    Trial t uses stream ``rng.child(t)``, so results do not depend on execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    est = LowerBoundEstimate(n, trials)
    for t in range(trials):
        a = sample_transversal_assignment(n, partition, structure, rng.child(t))
        est.conditional_entropy.add(assignment_conditional_entropy(a))
        est.cross_pairs.add(cross_class_pairs(a))
        est.image_pairs.add(math.comb(a.image_size, 2))
    return est


def distinct_interval_probability(partition: IntervalPartition, k_max: int = 24) -> float:
    """Pr[two uniform points fall in different intervals] = 1 - sum over groups g_k beta_k^2.

    For dyadic partitions the tail beyond ``k_max`` groups is below 4^-k_max.
    """
    k_max = partition.num_groups or k_max
    same = sum(Fraction(g) * b * b for g, b in partition.groups(k_max))
    return float(1 - same)


@dataclass(frozen=True)
class QuadraticChain:
    """Quantities of the quadratic-entropy argument at one n, estimated by Monte Carlo."""

    n: int
    k: int
    group_hits_mean: float
    group_hits_stderr: float
    group_hits_exact: float
    group_hits_floor: int
    image_tail_prob: float
    image_threshold: int
    lower_bound: float
    lower_bound_stderr: float
    proof_bound: float
    target: float


def quadratic_chain(n: int, partition: IntervalPartition, structure: TransversalStructure, k: int,
                   alpha_n, trials: int, rng: RngStream) -> QuadraticChain:
    """X = number of group-k intervals hit by n uniform points; compare with the argument's bounds."""
    if k < 1:
        raise ValueError("no admissible level k for this n")
    lo, hi = partition.group_start(k), partition.group_start(k + 1)
    threshold = n >> (k + 2)
    hits, cond = Tally(), Tally()
    tail = 0
    for t in range(trials):
        a = sample_transversal_assignment(n, partition, structure, rng.child(t))
        occupied = set(a.interval_of)
        hits.add(sum(1 for i in occupied if lo < i <= hi))
        tail += len(occupied) >= threshold
        cond.add(assignment_conditional_entropy(a))
    g = partition.group_count(k)
    beta = partition.group_length(k)
    exact_hits = g * -math.expm1(n * math.log1p(-float(beta)))
    p_tail = tail / trials
    return QuadraticChain(
        n=n,
        k=k,
        group_hits_mean=hits.mean,
        group_hits_stderr=hits.stderr,
        group_hits_exact=exact_hits,
        group_hits_floor=n >> (k + 1),
        image_tail_prob=p_tail,
        image_threshold=threshold,
        lower_bound=cond.mean,
        lower_bound_stderr=cond.stderr,
        proof_bound=p_tail * math.comb(threshold, 2),
        target=float(alpha_n * n * n),
    )


# Diagonal-block graphon: points in the same interval are adjacent, so G(n, W) is a
# disjoint union of cliques and its law is the law of the induced set partition.


def _set_partitions(items: list) -> Iterable[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _integer_partitions(n: int, largest: Optional[int] = None) -> Iterable[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for s in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - s, s):
            yield (s,) + rest


def diagonal_block_partition_probability(block_sizes) -> Fraction:
    """Pr[the points split into exactly these blocks], blocks in distinct intervals.

    Summing 2^-(i_B |B|) over distinct interval indices is done by Moebius
    inversion over merges of blocks: a merged group of total size s contributes
    sum_i 2^-(i s) = 1 / (2^s - 1), with coefficient prod (-1)^(m-1) (m-1)!.
    """
    sizes = [int(s) for s in block_sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("block sizes must be positive")
    total = Fraction(0)
    for merge in _set_partitions(list(range(len(sizes)))):
        term = Fraction(1)
        for grp in merge:
            m = len(grp)
            s = sum(sizes[i] for i in grp)
            term *= Fraction((-1) ** (m - 1) * math.factorial(m - 1), (1 << s) - 1)
        total += term
    return total


def _shape_multiplicity(shape: tuple[int, ...]) -> int:
    n = sum(shape)
    out = math.factorial(n)
    for s in shape:
        out //= math.factorial(s)
    for c in Counter(shape).values():
        out //= math.factorial(c)
    return out


def diagonal_block_distribution(n: int) -> dict[tuple[int, ...], Fraction]:
    """Block-size shape -> Pr[one particular set partition of that shape]."""
    if not 1 <= n <= DIAGONAL_MAX_N:
        raise ValueError(f"n must be in 1..{DIAGONAL_MAX_N}")
    return {shape: diagonal_block_partition_probability(shape) for shape in _integer_partitions(n)}


def diagonal_block_exact_entropy(n: int) -> float:
    """Ent(G(n, W)) for the diagonal-block graphon; no truncation is involved."""
    if n == 0:
        return 0.0
    law = diagonal_block_distribution(n)
    total = sum(_shape_multiplicity(s) * p for s, p in law.items())
    if total != 1:
        raise ArithmeticError(f"partition law sums to {total}")
    return math.fsum(_shape_multiplicity(s) * _psi(p) for s, p in law.items())


def diagonal_block_graph_distribution(n: int) -> GraphDistribution:
    """Same law as a GraphDistribution over labeled graphs (small n only)."""
    if n > 6:
        raise ValueError("labeled enumeration is limited to n <= 6")
    probs = {}
    for part in _set_partitions(list(range(n))):
        g = LabeledGraph.from_edges(n, [(u, v) for blk in part for u in blk for v in blk if u < v])
        probs[g.code()] = diagonal_block_partition_probability([len(b) for b in part])
    return GraphDistribution(n, probs)


def entropy_of_constant(n: int, p) -> float:
    """C(n, 2) h(p): the entropy of G(n, p)."""
    return math.comb(n, 2) * binary_entropy(p)
