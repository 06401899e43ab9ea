"""Step-function graphons, binary and graphon entropy, and L1 / delta_1 bounds.

All logarithms are base 2. Step measures and values may be ``Fraction`` (exact)
or ``float``; operations keep whichever type they are given.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from numbers import Rational
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graphs import LabeledGraph

MEASURE_TOL = 1e-12
COMPARE_TOL = 1e-9
GRID_TOL = 1e-9
EXHAUSTIVE_MAX_STEPS = 8
GRID_MAX_STEPS = 128


def _num(x):
    """Ints and rationals become ``Fraction``; everything else becomes ``float``."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def binary_entropy(x) -> float:
    """h(x) = -x log x - (1-x) log(1-x), with h(0) = h(1) = 0."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0 or x == 1:
        return 0.0
    x = float(x)
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


@dataclass(frozen=True)
class StepFunction:
    """Graphon constant on S_i x S_j, where the steps S_i are consecutive intervals of [0, 1]."""

    measures: tuple
    values: tuple

    def __post_init__(self):
        measures = tuple(_num(m) for m in self.measures)
        q = len(measures)
        if q == 0:
            raise ValueError("a step function needs at least one step")
        if any(m <= 0 for m in measures):
            raise ValueError("step measures must be positive")
        if abs(sum(measures) - 1) > MEASURE_TOL:
            raise ValueError(f"step measures sum to {float(sum(measures))!r}, not 1")
        rows = [tuple(_num(w) for w in row) for row in self.values]
        if len(rows) != q or any(len(r) != q for r in rows):
            raise ValueError(f"values must be a {q}x{q} matrix")
        for i in range(q):
            for j in range(q):
                w = rows[i][j]
                if not 0 <= w <= 1:
                    raise ValueError(f"value ({i},{j}) = {w} outside [0, 1]")
                if abs(w - rows[j][i]) > MEASURE_TOL:
                    raise ValueError(f"values not symmetric at ({i},{j})")
        sym = tuple(tuple(rows[min(i, j)][max(i, j)] for j in range(q)) for i in range(q))
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "values", sym)

    @classmethod
    def constant(cls, p) -> StepFunction:
        return cls((1,), ((p,),))

    @classmethod
    def equal_steps(cls, values) -> StepFunction:
        q = len(values)
        return cls(tuple(Fraction(1, q) for _ in range(q)), values)

    @property
    def q(self) -> int:
        return len(self.measures)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(m, Fraction) for m in self.measures) and all(
            isinstance(w, Fraction) for row in self.values for w in row
        )

    @property
    def random_free(self) -> bool:
        return is_random_free(self)

    def to_stepfunction(self) -> StepFunction:
        return self

    def exact(self) -> StepFunction:
        """Same graphon with every number converted exactly to ``Fraction``; measures renormalised."""
        ms = [Fraction(m) for m in self.measures]
        total = sum(ms)
        return StepFunction(
            tuple(m / total for m in ms),
            tuple(tuple(Fraction(w) for w in row) for row in self.values),
        )

    def breakpoints(self) -> list:
        """Right endpoints of the steps; the last one is exactly 1."""
        out, acc = [], 0
        for m in self.measures[:-1]:
            acc += m
            out.append(acc)
        out.append(type(acc)(1) if out else Fraction(1))
        return out

    def step_of(self, x) -> int:
        return min(bisect.bisect_right(self.breakpoints(), x), self.q - 1)

    def evaluate(self, x, y):
        return self.values[self.step_of(x)][self.step_of(y)]

    def to_matrix(self) -> np.ndarray:
        """Values as a read-only float array (computed once)."""
        return self._matrix

    @cached_property
    def _matrix(self) -> np.ndarray:
        m = np.array([[float(w) for w in row] for row in self.values])
        m.setflags(write=False)
        return m


def graphon_entropy(w) -> float:
    """Ent(W) = double integral of h(W); exact weighted sum for step functions, 0 for 0/1 constructions."""
    if isinstance(w, StepFunction):
        q = w.q
        terms = [
            float(w.measures[i] * w.measures[j]) * binary_entropy(w.values[i][j])
            for i in range(q)
            for j in range(q)
        ]
        return math.fsum(terms)
    if getattr(w, "random_free", False):
        return 0.0
    raise TypeError(f"cannot compute the entropy of {type(w).__name__}")


def is_random_free(w: StepFunction) -> bool:
    return all(v == 0 or v == 1 for row in w.values for v in row)


def graph_to_stepfunction(g: LabeledGraph) -> StepFunction:
    """W_G: n equal steps, value 1 on S_i x S_j iff ij is an edge."""
    if g.n == 0:
        raise ValueError("W_G is undefined for the empty vertex set")
    return StepFunction(
        tuple(Fraction(1, g.n) for _ in range(g.n)),
        tuple(tuple(int(g.has_edge(i, j)) for j in range(g.n)) for i in range(g.n)),
    )


def step_average(w, groups: Sequence[Sequence[int]]) -> StepFunction:
    """Project onto the coarser partition whose blocks are unions of the given step groups."""
    w = w.to_stepfunction()
    flat = sorted(i for grp in groups for i in grp)
    if flat != list(range(w.q)) or any(len(g) == 0 for g in groups):
        raise ValueError("groups must partition the step indices")
    mass = [sum(w.measures[i] for i in grp) for grp in groups]
    k = len(groups)
    values = [[None] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            total = sum(
                w.measures[i] * w.measures[j] * w.values[i][j] for i in groups[a] for j in groups[b]
            )
            avg = total / (mass[a] * mass[b])
            if isinstance(avg, float):
                avg = min(1.0, max(0.0, avg))
            values[a][b] = values[b][a] = avg
    return StepFunction(tuple(mass), tuple(tuple(r) for r in values))


def _refined_cells(w1: StepFunction, w2: StepFunction):
    cuts = sorted(set(w1.breakpoints()) | set(w2.breakpoints()))
    cells, prev = [], 0
    for c in cuts:
        if c > prev:
            mid = (prev + c) / 2
            cells.append((c - prev, w1.step_of(mid), w2.step_of(mid)))
        prev = c
    return cells


def l1_distance(w1: StepFunction, w2: StepFunction):
    """||W1 - W2||_1 computed on the common refinement of the two step partitions."""
    cells = _refined_cells(w1, w2)
    total = 0
    for la, i1, i2 in cells:
        for lb, j1, j2 in cells:
            total += la * lb * abs(w1.values[i1][j1] - w2.values[i2][j2])
    return total


@dataclass(frozen=True)
class Delta1Bound:
    """Upper bound on delta_1 from a step permutation on a common equal-measure grid."""

    value: float
    permutation: tuple[int, ...]
    grid: int
    exhaustive: bool


def _grid_size(measures) -> int:
    q = 1
    for m in measures:
        r = Fraction(m).limit_denominator(GRID_MAX_STEPS)
        if abs(float(m) - float(r)) > GRID_TOL:
            raise ValueError(f"measure {m} is not commensurable at resolution {GRID_TOL}")
        q = math.lcm(q, r.denominator)
        if q > GRID_MAX_STEPS:
            raise ValueError(f"common grid needs more than {GRID_MAX_STEPS} steps")
    return q


def equal_grid_matrix(w: StepFunction, q: int) -> np.ndarray:
    """q x q matrix of W on the uniform grid with q cells (each step must be a union of cells)."""
    idx = []
    for i, m in enumerate(w.measures):
        cells = round(float(m) * q)
        idx += [i] * cells
    if len(idx) != q:
        raise ValueError("measures do not fit the grid")
    a = w.to_matrix()
    return a[np.ix_(idx, idx)]


def _qap_local_search(a: np.ndarray, b: np.ndarray, start: np.ndarray) -> np.ndarray:
    perm = start.copy()
    bp = b[np.ix_(perm, perm)]
    q = len(perm)
    improved = True
    while improved:
        improved = False
        for x in range(q):
            for y in range(x + 1, q):
                old = _cross_cost(a, bp, x, y)
                swap = np.arange(q)
                swap[x], swap[y] = y, x
                cand = bp[np.ix_(swap, swap)]
                if _cross_cost(a, cand, x, y) < old - 1e-15:
                    bp = cand
                    perm[x], perm[y] = perm[y], perm[x]
                    improved = True
    return perm


def _cross_cost(a, bp, x, y) -> float:
    d = np.abs(a - bp)
    return d[[x, y], :].sum() + d[:, [x, y]].sum() - d[np.ix_([x, y], [x, y])].sum()


def delta1_upper(w1: StepFunction, w2: StepFunction) -> Delta1Bound:
    """min over grid-step permutations s of ||W1 - W2 o s||_1.

    This only searches measure-preserving maps that permute grid cells, so the
    result bounds delta_1 from above. The search is exhaustive for grids of at most
    ``EXHAUSTIVE_MAX_STEPS`` cells; beyond that it is an assignment-seeded local
    search and ``exhaustive`` is False.
    """
    q = math.lcm(_grid_size(w1.measures), _grid_size(w2.measures))
    if q > GRID_MAX_STEPS:
        raise ValueError(f"common grid needs more than {GRID_MAX_STEPS} steps")
    a = equal_grid_matrix(w1, q)
    b = equal_grid_matrix(w2, q)
    if q <= EXHAUSTIVE_MAX_STEPS:
        perms = np.array(list(permutations(range(q))))
        permuted = b[perms[:, :, None], perms[:, None, :]]
        costs = np.abs(permuted - a[None]).sum(axis=(1, 2))
        best = int(np.argmin(costs))
        return Delta1Bound(float(costs[best]) / q**2, tuple(int(i) for i in perms[best]), q, True)
    profile = np.abs(np.sort(a, axis=1)[:, None, :] - np.sort(b, axis=1)[None, :, :]).sum(axis=2)
    _, col = linear_sum_assignment(profile)
    candidates = [_qap_local_search(a, b, np.arange(q)), _qap_local_search(a, b, col)]
    costs = [np.abs(a - b[np.ix_(p, p)]).sum() for p in candidates]
    best = int(np.argmin(costs))
    return Delta1Bound(float(costs[best]) / q**2, tuple(int(i) for i in candidates[best]), q, False)
