"""Named verification suites, shared by the ``verify`` subcommand and the acceptance tests."""
from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from scipy.stats import chisquare

from .constructions import (
    IntervalPartition,
    alpha_partition,
    bigraph_B,
    inverse_alpha,
    ktt_mixture_graphon,
    layer_sizes,
    quadratic_level,
)
from .core import StepFunction, binary_entropy, graphon_entropy, l1_distance
from .densities import bigraph_density, contains_induced_subbigraph, is_ktt_free, largest_homogeneous_set
from .entropy import (
    assignment_conditional_entropy,
    cross_class_pairs,
    diagonal_block_exact_entropy,
    diagonal_block_partition_probability,
    exact_graph_distribution,
    shannon_entropy,
    quadratic_chain,
    tv_like_distance,
    unlabel_distribution,
)
from .graphs import LabeledGraph
from .rng import RngStream
from .sampling import sample_graph_stepfunction, sample_transversal_assignment, transversal_edges

SLACK = 1e-9


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    measured: object = None
    bound: object = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.label}: measured={self.measured} bound={self.bound}"


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label: str, passed: bool, measured=None, bound=None) -> None:
        self.checks.append(Check(label, bool(passed), measured, bound))

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        out.append(f"suite {self.name}: {'PASS' if self.passed else 'FAIL'} ({self.elapsed:.2f} s)")
        return out


def random_stepfunction(rng: RngStream, q: int, denominator: int = 12, random_free: bool = False) -> StepFunction:
    """Exact step function with random positive measures and random symmetric values."""
    weights = [int(rng.gen.integers(1, 10)) for _ in range(q)]
    measures = tuple(Fraction(x, sum(weights)) for x in weights)
    values = [[Fraction(0)] * q for _ in range(q)]
    for i in range(q):
        for j in range(i, q):
            if random_free:
                v = Fraction(rng.coin())
            else:
                v = Fraction(int(rng.gen.integers(0, denominator + 1)), denominator)
            values[i][j] = values[j][i] = v
    return StepFunction(measures, tuple(tuple(r) for r in values))


def _timed(fn: Callable[..., Report]) -> Callable[..., Report]:
    @functools.wraps(fn)
    def run(*args, **kwargs) -> Report:
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.elapsed = time.perf_counter() - start
        return report

    return run


@_timed
def uniformity(trials: int = 10**5, seed: int = 7, s: int = 3, time_limit: float = 30.0) -> Report:
    """Graphs on s points in pairwise-distinct intervals are uniform over all 2^C(s,2) labeled graphs."""
    start = time.perf_counter()
    report = Report("uniformity")
    counts, rejected = _distinct_interval_counts(alpha_partition(inverse_alpha(), 4), s, trials, RngStream(seed))
    p = float(chisquare(counts).pvalue)
    elapsed = time.perf_counter() - start
    report.add(f"chi-square p-value over {len(counts)} outcomes ({trials} samples)", p >= 1e-3, round(p, 6), ">= 0.001")
    report.add("runtime", elapsed < time_limit, f"{elapsed:.2f} s", f"< {time_limit} s")
    report.add("counts", True, counts, f"rejected {rejected}")
    # the 1/n partition almost never hits layers 1..5; the coarse one always does
    coarse, _ = _distinct_interval_counts(_coarse_partition(), s, max(trials // 4, 1), RngStream(seed, 1))
    pc = float(chisquare(coarse).pvalue)
    report.add("chi-square p-value, six equal intervals (layers 1..6)", pc >= 1e-3, round(pc, 6), ">= 0.001")
    return report


def _distinct_interval_counts(part: IntervalPartition, s: int, trials: int, rng: RngStream):
    structure = layer_sizes(5)
    counts = [0] * (1 << math.comb(s, 2))
    accepted = rejected = 0
    while accepted < trials:
        a = sample_transversal_assignment(s, part, structure, rng)
        if a.image_size < s:
            rejected += 1
            continue
        counts[transversal_edges(a, rng).code()] += 1
        accepted += 1
    return counts, rejected


def _coarse_partition() -> IntervalPartition:
    # six equal intervals: points collide often, so layers 1..5 and vertex classes are exercised
    return IntervalPartition.finite([(6, Fraction(1, 6))], name="six-equal")


@_timed
def conditional_bound(trials: int = 10**4, nmax: int = 12, seed: int = 11) -> Report:
    """Conditional entropy given an assignment is at least C(|Im|, 2); zero violations allowed."""
    report = Report("conditional-bound")
    structure = layer_sizes(5)
    partitions = [alpha_partition(inverse_alpha(), 4), _coarse_partition()]
    rng = RngStream(seed)
    bad_exact = bad_pairs = 0
    worst = math.inf
    for t in range(trials):
        n = 1 + t % nmax
        a = sample_transversal_assignment(n, partitions[t % 2], structure, rng.child(t))
        floor = math.comb(a.image_size, 2)
        h = assignment_conditional_entropy(a)
        worst = min(worst, h - floor)
        bad_exact += h < floor - SLACK
        bad_pairs += cross_class_pairs(a) < floor
    report.add("exact conditional entropy >= C(|Im|,2)", bad_exact == 0, f"{bad_exact} violations, min slack {worst:.6g}", 0)
    report.add("cross-class pair count >= C(|Im|,2)", bad_pairs == 0, f"{bad_pairs} violations", 0)
    return report


@_timed
def chain(n: int = 4096, trials: int = 1000, seed: int = 13, time_limit: float = 120.0) -> Report:
    """Group-hit count, image-size tail, and the resulting entropy bound at a single n."""
    start = time.perf_counter()
    report = Report("chain")
    alpha = inverse_alpha()
    k = quadratic_level(n, alpha)
    report.add("selected level k", k >= 1, k, ">= 1")
    if k < 1:
        return report
    part = alpha_partition(alpha, k + 1)
    c = quadratic_chain(n, part, layer_sizes(5), k, alpha(n), trials, RngStream(seed))
    report.add(
        f"E[X] >= n 2^-(k+1) within 3 sigma (exact {c.group_hits_exact:.3f})",
        c.group_hits_mean + 3 * c.group_hits_stderr >= c.group_hits_floor,
        f"{c.group_hits_mean:.3f} +- {c.group_hits_stderr:.3f}",
        c.group_hits_floor,
    )
    report.add(f"Pr[|Im| >= {c.image_threshold}] >= 1/2", c.image_tail_prob >= 0.5, c.image_tail_prob, 0.5)
    report.add(
        "conditional-entropy lower bound >= alpha(n) n^2",
        c.lower_bound >= c.target,
        f"{c.lower_bound:.1f} +- {c.lower_bound_stderr:.1f}",
        c.target,
    )
    report.add("Pr-weighted pair bound >= alpha(n) n^2", c.proof_bound >= c.target, c.proof_bound, c.target)
    elapsed = time.perf_counter() - start
    report.add("runtime", elapsed < time_limit, f"{elapsed:.2f} s", f"< {time_limit} s")
    return report


@_timed
def pair_limit(nmax: int = 6, seed: int = 17) -> Report:
    """Ent(G(n, W)) / C(n, 2) against Ent(W) for constant and two-step graphons."""
    report = Report("pair-limit")
    worst = 0.0
    for tenth in range(1, 10):
        p = Fraction(tenth, 10)
        h = binary_entropy(p)
        for n in range(2, nmax + 1):
            ratio = shannon_entropy(exact_graph_distribution(n, StepFunction.constant(p))) / math.comb(n, 2)
            worst = max(worst, abs(ratio - h))
    report.add("constant p: |Ent/C(n,2) - h(p)| for p in 0.1..0.9, n <= 6", worst <= 1e-9, f"{worst:.3g}", 1e-9)
    w = random_stepfunction(RngStream(seed), 2)
    ent_w = graphon_entropy(w)
    gaps = []
    for n in range(3, nmax + 1):
        gaps.append(shannon_entropy(exact_graph_distribution(n, w)) / math.comb(n, 2) - ent_w)
    gaps = [abs(g) for g in gaps]
    monotone = all(b <= a + SLACK for a, b in zip(gaps, gaps[1:]))
    report.add("two-step W: |Ent/C(n,2) - Ent(W)| non-increasing for n = 3..6", monotone, [round(g, 9) for g in gaps], "non-increasing")
    return report


@_timed
def approximation(pairs: int = 200, seed: int = 19) -> Report:
    """Entropy continuity and the sampling bound on random exact step-function pairs."""
    report = Report("approximation")
    rng = RngStream(seed)
    bad_ent = bad_l1 = 0
    for t in range(pairs):
        r = rng.child(t)
        n = int(r.gen.integers(1, 4))
        q1, q2 = int(r.gen.integers(1, 4)), int(r.gen.integers(1, 4))
        w1 = random_stepfunction(r, q1)
        # half the pairs share the partition of w1, half use their own
        w2 = random_stepfunction(r, q1) if t % 2 else random_stepfunction(r, q2)
        if t % 2:
            w2 = StepFunction(w1.measures, w2.values)
        mu1, mu2 = exact_graph_distribution(n, w1), exact_graph_distribution(n, w2)
        dist = tv_like_distance(mu1, mu2)
        omega = 1 << math.comb(n, 2)
        lhs = abs(shannon_entropy(mu1) - shannon_entropy(mu2))
        x = dist / omega
        rhs = omega * binary_entropy(min(x, Fraction(1, 2)))
        bad_ent += lhs > rhs + SLACK
        bad_l1 += dist > n * n * l1_distance(w1, w2)
    report.add("|Ent(mu1) - Ent(mu2)| <= |Omega| h(||mu1 - mu2||_1 / |Omega|)", bad_ent == 0, f"{bad_ent} violations", 0)
    report.add("||mu1 - mu2||_1 <= n^2 ||W1 - W2||_1", bad_l1 == 0, f"{bad_l1} violations", 0)
    return report


@_timed
def diagonal_block(nmax: int = 9) -> Report:
    """Diagonal-block graphon: linear entropy and small homogeneous sets in the union of cliques."""
    report = Report("janson")
    values = {n: diagonal_block_exact_entropy(n) for n in range(1, nmax + 1)}
    report.add(f"Ent <= 2n for n <= {nmax}", all(v <= 2 * n for n, v in values.items()),
               {n: round(v, 6) for n, v in values.items()}, "2n")
    ratios = {n: values[n] / n for n in range(4, nmax + 1)}
    report.add("Ent / n in [0.9, 2] for n >= 4", all(0.9 <= r <= 2 for r in ratios.values()),
               {n: round(r, 6) for n, r in ratios.items()}, "[0.9, 2]")
    for n in (2, 3, 4):
        g = LabeledGraph.disjoint_cliques([n] * n)
        report.add(f"largest homogeneous set of {n} disjoint K_{n}", largest_homogeneous_set(g) == n,
                   largest_homogeneous_set(g), n)
        p = diagonal_block_partition_probability([n] * n)
        report.add(f"Pr[partition into {n} blocks of size {n}] > 0", p > 0, f"{float(p):.6g}", "> 0")
    return report


@_timed
def ktt_mixture(samples: int = 10**4, nmax: int = 6, seed: int = 23, t: int = 2, mixture_nmax: int = 5) -> Report:
    """K_{t,t}-free mixture: zero bigraph density for B(t) and no sampled copy of B(t)."""
    report = Report("ktt-mixture")
    w = ktt_mixture_graphon(t, mixture_nmax)
    b = bigraph_B(t)
    dens = bigraph_density(b, w, mode="exact")
    report.add(f"p^b(B({t}); W) = 0 exactly ({len(w.graphs)} blocks)", dens.value == 0, str(dens.value), 0)
    report.add("every block graph is K_{t,t}-free", all(is_ktt_free(g, t) for g in w.graphs), len(w.graphs), "all")
    step = w.to_stepfunction()
    rng = RngStream(seed)
    hits = 0
    for i in range(samples):
        g, _ = sample_graph_stepfunction(1 + i % nmax, step, rng)
        hits += contains_induced_subbigraph(g, b)
    report.add(f"sampled graphs containing B({t})", hits == 0, f"{hits} of {samples}", 0)
    return report


@_timed
def support_bound(count: int = 20, qmax: int = 4, nmax: int = 5, seed: int = 29) -> Report:
    """Random-free step functions with q steps give at most q^n distinct graphs on n vertices."""
    report = Report("support-bound")
    rng = RngStream(seed)
    bad, rows = 0, []
    for i in range(count):
        r = rng.child(i)
        q = 1 + i % qmax
        n = 1 + (i // qmax) % nmax
        w = random_stepfunction(r, q, random_free=True)
        size = exact_graph_distribution(n, w).support_size()
        rows.append((q, n, size))
        bad += size > q**n
    report.add("|supp G(n,W)| <= q^n", bad == 0, f"{bad} violations over {rows}", "q^n")
    return report


@_timed
def unlabeled(count: int = 50, nmax: int = 4, seed: int = 31) -> Report:
    """Ent(labeled) - log2(n!) <= Ent(unlabeled) <= Ent(labeled)."""
    report = Report("unlabeled")
    rng = RngStream(seed)
    bad = 0
    for i in range(count):
        r = rng.child(i)
        n = 1 + i % nmax
        w = random_stepfunction(r, int(r.gen.integers(1, 4)))
        d = exact_graph_distribution(n, w)
        lab = shannon_entropy(d)
        unl = shannon_entropy(unlabel_distribution(d))
        bad += not (lab - math.log2(math.factorial(n)) - SLACK <= unl <= lab + SLACK)
    report.add("sandwich on random step functions", bad == 0, f"{bad} violations", 0)
    return report


SUITES: dict[str, Callable[..., Report]] = {
    "uniformity": uniformity,
    "conditional-bound": conditional_bound,
    "chain": chain,
    "pair-limit": pair_limit,
    "approximation": approximation,
    "janson": diagonal_block,
    "ktt-mixture": ktt_mixture,
    "support-bound": support_bound,
    "unlabeled": unlabeled,
}
