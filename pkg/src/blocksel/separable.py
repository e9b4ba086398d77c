"""Separable allocation machinery for the fixed-parameter subproblems.

Once the free parameters are pinned, the subset-selection objective splits
across blocks: an allocation assigns each block a cardinality j_i and the
total cost is the sum of per-block values val(i; j_i).  This module contains
the exact solvers on such tables: the closed-form greedy for the diagonal
case, a dynamic program, and the incremental chain that climbs one
cardinality level at a time using bounded exchange steps.

The chain's step set is governed by the proximity radius theta_bar of the
block structure: moving from an optimal level-s allocation to some optimal
level-(s+1) allocation never requires removing more than theta_bar units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .linalg import QuadraticForm, eval_form
from .model import BlockStructure


@dataclass(frozen=True)
class ValTable:
    """Per-block value rows: values[i][j] is the cost of cardinality j in block i."""

    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("table needs at least one block")
        if any(len(row) < 1 for row in self.values):
            raise ValueError("each block needs a cardinality-0 value")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Fraction]]) -> "ValTable":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @property
    def h(self) -> int:
        return len(self.values)

    def structure(self) -> BlockStructure:
        return BlockStructure(self.h, tuple(len(row) - 1 for row in self.values))

    def total(self, allocation: Sequence[int]) -> Fraction:
        return sum(
            (self.values[i][j] for i, j in enumerate(allocation)), Fraction(0)
        )


@dataclass(frozen=True)
class DeltaExpr:
    """One exchange step: per-block cardinality moves with their cost delta.

    changes lists (block, j_from, j_to) for every block that moves, sorted by
    block index.  q is the total decrease; the total increase is q + 1.  In
    numeric mode value carries the exact cost difference; in symbolic mode
    form carries it as a quadratic form in the free parameters.  target is
    the destination allocation when the step is anchored at a concrete
    source allocation (chain use); pattern-only entries leave it None.
    """

    changes: tuple[tuple[int, int, int], ...]
    q: int
    value: Optional[Fraction] = None
    form: Optional[QuadraticForm] = None
    target: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        inc = sum(t - f for _, f, t in self.changes if t > f)
        dec = sum(f - t for _, f, t in self.changes if t < f)
        if dec != self.q or inc != self.q + 1:
            raise ValueError("changes do not realize a (q, q+1) exchange")
        blocks = [blk for blk, _, _ in self.changes]
        if blocks != sorted(set(blocks)):
            raise ValueError("changes must be sorted by block and distinct")

    def pattern_key(self) -> tuple:
        return self.changes


def weak_composition_count(total: int, parts: int) -> int:
    """Number of ways to write total as an ordered sum of parts non-negative ints."""
    if parts <= 0:
        return 1 if total == 0 and parts == 0 else 0
    return math.comb(total + parts - 1, parts - 1)


def d_pattern_bound(structure: BlockStructure) -> int:
    """Upper bound on the number of distinct exchange patterns.

    Sums, over each allowed decrease q, the weak compositions of q+1 (the
    increases) and of q (the decreases) across the h blocks, times the
    per-block choices of starting cardinality for every changed unit.
    """
    h = structure.h
    theta = structure.theta
    total = 0
    for q in range(structure.theta_bar + 1):
        total += (
            math.comb(q + h, q + 1)
            * math.comb(q + h - 1, q)
            * theta ** (2 * q + 1)
        )
    return total


def diag_greedy(
    a: Sequence[Fraction], b_prime: Sequence[Fraction], sigma: int
) -> tuple[list[Fraction], Fraction, list[int]]:
    """Closed-form solution for a diagonal system with an adjusted right side.

    Only coordinates with a nonzero diagonal entry can absorb anything; among
    those, picking the min(sigma, count) largest |b'| values is optimal.  Ties
    go to the smaller index.  Returns (x, objective, chosen indices).
    """
    if len(a) != len(b_prime):
        raise ValueError("a and b' must have the same length")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    n = len(a)
    hittable = [i for i in range(n) if a[i] != 0]
    ranked = sorted(hittable, key=lambda i: (-abs(b_prime[i]), i))
    chosen = sorted(ranked[: min(sigma, len(hittable))])
    chosen_set = set(chosen)
    x = [Fraction(0)] * n
    objective = Fraction(0)
    for i in range(n):
        if i in chosen_set:
            x[i] = b_prime[i] / a[i]
        else:
            objective += b_prime[i] * b_prime[i]
    return x, objective, chosen


def q_closeness(j_from: Sequence[int], j_to: Sequence[int]) -> int:
    """Total decrease q between consecutive-level allocations.

    Requires sum(j_to) == sum(j_from) + 1; the total increase is then q + 1
    and the l1 distance 2q + 1.
    """
    if len(j_from) != len(j_to):
        raise ValueError("allocations must have the same length")
    if sum(j_to) != sum(j_from) + 1:
        raise ValueError("target must sit one level above the source")
    return sum(f - t for f, t in zip(j_from, j_to) if t < f)


def aug_set(
    structure: BlockStructure,
    j_source: Sequence[int],
    q_max: Optional[int] = None,
) -> list[tuple[int, ...]]:
    """All next-level allocations reachable with decrease at most q_max.

    Generated by direct recursion over per-block target cardinalities, with
    partial sums pruned against the remaining capacity and the running
    decrease pruned against the bound.  Output is sorted lexicographically.
    """
    if len(j_source) != structure.h:
        raise ValueError("allocation length must match the structure")
    for i, j in enumerate(j_source):
        if j < 0 or j > structure.n_vec[i]:
            raise ValueError("source allocation out of range")
    bound = structure.theta_bar if q_max is None else q_max
    h = structure.h
    target_sum = sum(j_source) + 1
    # Remaining capacity after block i, for pruning partial sums.
    suffix = [0] * (h + 1)
    for i in range(h - 1, -1, -1):
        suffix[i] = suffix[i + 1] + structure.n_vec[i]
    out: list[tuple[int, ...]] = []
    chosen = [0] * h

    def recurse(i: int, total: int, dec: int) -> None:
        if i == h:
            out.append(tuple(chosen))
            return
        lo = max(0, target_sum - total - suffix[i + 1])
        hi = min(structure.n_vec[i], target_sum - total)
        for t in range(lo, hi + 1):
            ndec = dec + (j_source[i] - t if t < j_source[i] else 0)
            if ndec > bound:
                continue
            chosen[i] = t
            recurse(i + 1, total + t, ndec)

    recurse(0, 0, 0)
    return out


def delta_value(
    table: ValTable, j_source: Sequence[int], j_target: Sequence[int]
) -> Fraction:
    """Exact cost difference of an exchange step on a numeric table."""
    q_closeness(j_source, j_target)  # validates the level relation
    total = Fraction(0)
    for i, (f, t) in enumerate(zip(j_source, j_target)):
        if f != t:
            total += table.values[i][t] - table.values[i][f]
    return total


def _delta_from_pair(
    j_source: Sequence[int], j_target: Sequence[int], value=None, form=None
) -> DeltaExpr:
    changes = tuple(
        (i, f, t) for i, (f, t) in enumerate(zip(j_source, j_target)) if f != t
    )
    q = sum(f - t for _, f, t in changes if t < f)
    return DeltaExpr(changes, q, value=value, form=form, target=tuple(j_target))


def _enumerate_patterns(structure: BlockStructure) -> list[tuple[tuple[int, int, int], ...]]:
    """All exchange patterns (block, j_from, j_to), by direct recursion."""
    bound = structure.theta_bar
    h = structure.h
    results: list[tuple[tuple[int, int, int], ...]] = []
    current: list[tuple[int, int, int]] = []

    def recurse(i: int, inc: int, dec: int) -> None:
        if i == h:
            if inc == dec + 1:
                results.append(tuple(current))
            return
        # Block i stays put...
        recurse(i + 1, inc, dec)
        n_i = structure.n_vec[i]
        # ...or moves from j_from to j_to (any feasible ordered pair).
        for j_from in range(n_i + 1):
            for j_to in range(n_i + 1):
                if j_to == j_from:
                    continue
                d = j_to - j_from
                ninc = inc + (d if d > 0 else 0)
                ndec = dec + (-d if d < 0 else 0)
                if ndec > bound or ninc > bound + 1:
                    continue
                current.append((i, j_from, j_to))
                recurse(i + 1, ninc, ndec)
                current.pop()

    recurse(0, 0, 0)
    results.sort()
    return results


def build_d(
    structure: BlockStructure,
    table: Optional[ValTable] = None,
    forms: Optional[Sequence[Sequence[QuadraticForm]]] = None,
) -> list[DeltaExpr]:
    """The deduplicated exchange set D over all feasible source allocations.

    Exactly one of table (numeric mode) or forms (symbolic mode) must be
    given; forms[i][j] is the symbolic value of cardinality j in block i.
    Numeric entries dedup by (pattern, value) so distinct patterns survive;
    symbolic entries dedup by the canonical coefficient key of their form,
    which is what the downstream hyperplane construction needs.
    """
    if (table is None) == (forms is None):
        raise ValueError("give exactly one of table or forms")
    patterns = _enumerate_patterns(structure)
    out: list[DeltaExpr] = []
    seen: set = set()
    for changes in patterns:
        q = sum(f - t for _, f, t in changes if t < f)
        if table is not None:
            val = sum(
                (table.values[i][t] - table.values[i][f] for i, f, t in changes),
                Fraction(0),
            )
            key = (changes, val)
            if key in seen:
                continue
            seen.add(key)
            out.append(DeltaExpr(changes, q, value=val))
        else:
            assert forms is not None
            form: Optional[QuadraticForm] = None
            for i, f, t in changes:
                step = forms[i][t].sub(forms[i][f])
                form = step if form is None else form.add(step)
            assert form is not None
            key = form.coefficients_key()
            if key in seen:
                continue
            seen.add(key)
            out.append(DeltaExpr(changes, q, form=form))
    return out


def chain_solve(
    table: ValTable,
    sigma: int,
    key: Optional[Callable[[DeltaExpr], object]] = None,
    return_trace: bool = False,
):
    """Climb from the zero allocation one level at a time.

    At each level every exchange step in the bounded-decrease neighbourhood
    is scored and the minimum is taken; ties break toward the
    lexicographically smallest target allocation.  A custom key makes the
    same walk usable with evaluate-at-witness comparators.  Returns
    (allocation, objective) or, with return_trace, (allocation, objective,
    [levels 0..sigma]).
    """
    structure = table.structure()
    if sigma < 0 or sigma > structure.n_total:
        raise ValueError("sigma out of range for the table")
    values = table.values
    current = tuple(0 for _ in range(structure.h))
    trace = [current]
    for _ in range(sigma):
        best: Optional[tuple[int, ...]] = None
        best_key: object = None
        for target in aug_set(structure, current):
            if key is None:
                val = Fraction(0)
                for i, (f, t) in enumerate(zip(current, target)):
                    if f != t:
                        val += values[i][t] - values[i][f]
                k: object = (val, target)
            else:
                val = delta_value(table, current, target)
                k = key(_delta_from_pair(current, target, value=val))
            if best is None or k < best_key:
                best, best_key = target, k
        assert best is not None
        current = best
        trace.append(current)
    objective = table.total(current)
    if return_trace:
        return current, objective, trace
    return current, objective


def dp_solve(table: ValTable, sigma: int) -> tuple[tuple[int, ...], Fraction]:
    """Exact optimum over allocations summing to sigma, by dynamic programming.

    best(i, j) = min over t of best(i-1, j-t) + val(i, t).  Ties prefer the
    lexicographically smallest allocation.
    """
    structure = table.structure()
    if sigma < 0 or sigma > structure.n_total:
        raise ValueError("sigma out of range for the table")
    # best[j] = (value, allocation reversed-prefix) after each block.
    best: list[Optional[tuple[Fraction, tuple[int, ...]]]] = [None] * (sigma + 1)
    best[0] = (Fraction(0), ())
    for i in range(structure.h):
        row = table.values[i]
        nxt: list[Optional[tuple[Fraction, tuple[int, ...]]]] = [None] * (sigma + 1)
        for j in range(sigma + 1):
            if best[j] is None:
                continue
            base_val, base_alloc = best[j]
            for t in range(min(structure.n_vec[i], sigma - j) + 1):
                cand = (base_val + row[t], base_alloc + (t,))
                slot = nxt[j + t]
                if slot is None or cand < slot:
                    nxt[j + t] = cand
        best = nxt
    if best[sigma] is None:
        raise ValueError("no allocation reaches the requested level")
    value, alloc = best[sigma]
    return alloc, value
