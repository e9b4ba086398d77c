"""Reference solvers that certify the main pipeline at small scale.

Nothing here shares candidate generation with the solver module: brute
force enumerates supports directly and the fixed-parameter reference only
reuses the exact least squares and allocation primitives.  Agreement
between the two stacks is what the test suite leans on.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import eval_form, least_squares, residual_quadratic
from .model import (
    BudgetExceededError,
    Instance,
    ReducedProblem,
    Solution,
    make_solution,
    validate,
)
from .separable import ValTable, dp_solve


def _all_columns(instance: Instance) -> list[tuple[Fraction, ...]]:
    """The d selectable columns of the stacked system, block part first."""
    m = instance.m_total
    row_offsets = instance.row_offsets()
    cols: list[tuple[Fraction, ...]] = []
    for bi, blk in enumerate(instance.blocks):
        r0 = row_offsets[bi]
        for c in range(blk.cols):
            col = [Fraction(0)] * m
            for r in range(blk.rows):
                col[r0 + r] = blk.at(r, c)
            cols.append(tuple(col))
    cols.extend(instance.coupling)
    return cols


def _support_count(d: int, sigma: int) -> int:
    return sum(math.comb(d, s) for s in range(sigma + 1))


def brute_force(instance: Instance, max_supports: int = 10**6) -> Solution:
    """Exact optimum by enumerating every support of size at most sigma.

    The intercept column, when present, is appended free to every support.
    Ties prefer the lexicographically smallest support.  Raises
    BudgetExceededError before starting when the enumeration is too large.
    """
    problems = validate(instance)
    if problems:
        raise ValueError("; ".join(problems))
    total = _support_count(instance.d, instance.sigma)
    if total > max_supports:
        raise BudgetExceededError(
            f"brute force over {total} supports exceeds the limit of {max_supports}"
        )
    cols = _all_columns(instance)
    best = None
    for size in range(instance.sigma + 1):
        for sup in itertools.combinations(range(instance.d), size):
            chosen = [cols[i] for i in sup]
            if instance.intercept is not None:
                chosen.append(instance.intercept)
            coeffs, res2 = least_squares(chosen, instance.b)
            key = (res2, sup)
            if best is None or key < best[0]:
                best = (key, coeffs)
    assert best is not None
    (res2, sup), coeffs = best
    x = [Fraction(0)] * instance.d
    for idx, v in zip(sup, coeffs):
        x[idx] = v
    mu = coeffs[-1] if instance.intercept is not None else None
    solution = make_solution(instance, x, mu, sup)
    assert solution.objective == res2
    return solution


def brute_force_levels(
    instance: Instance,
    levels: Optional[int] = None,
    max_supports: int = 10**6,
) -> list[Solution]:
    """Brute-force optima for every budget 0..levels in one enumeration.

    Entry s is the best solution using at most s variables; the list is
    non-increasing in objective by construction.  levels defaults to d.
    """
    problems = validate(instance)
    if problems:
        raise ValueError("; ".join(problems))
    top = instance.d if levels is None else levels
    if top < 0:
        raise ValueError("levels must be non-negative")
    total = _support_count(instance.d, min(top, instance.d))
    if total > max_supports:
        raise BudgetExceededError(
            f"brute force over {total} supports exceeds the limit of {max_supports}"
        )
    cols = _all_columns(instance)
    best_by_size: list = [None] * (min(top, instance.d) + 1)
    for size in range(len(best_by_size)):
        for sup in itertools.combinations(range(instance.d), size):
            chosen = [cols[i] for i in sup]
            if instance.intercept is not None:
                chosen.append(instance.intercept)
            coeffs, res2 = least_squares(chosen, instance.b)
            key = (res2, sup)
            if best_by_size[size] is None or key < best_by_size[size][0]:
                best_by_size[size] = (key, coeffs)

    out: list[Solution] = []
    running = None
    for size in range(top + 1):
        if size < len(best_by_size) and best_by_size[size] is not None:
            if running is None or best_by_size[size][0] < running[0]:
                running = best_by_size[size]
        assert running is not None
        (res2, sup), coeffs = running
        x = [Fraction(0)] * instance.d
        for idx, v in zip(sup, coeffs):
            x[idx] = v
        mu = coeffs[-1] if instance.intercept is not None else None
        out.append(make_solution(instance, x, mu, sup))
    return out


def fixed_lambda_opt(
    rp: ReducedProblem, lam: Sequence[Fraction]
) -> tuple[Fraction, tuple[int, ...]]:
    """Optimal value and support of a subproblem at pinned parameters.

    Builds the per-block table of best residuals per cardinality at lam and
    solves the allocation by dynamic programming.  Independent of the
    geometric candidate machinery, so it doubles as its referee.
    """
    if len(lam) != rp.k_prime:
        raise ValueError("lambda must have one entry per free column")
    offset = 0
    rows_values: list[tuple[Fraction, ...]] = []
    rows_supports: list[tuple[tuple[int, ...], ...]] = []
    for blk in rp.blocks:
        rows = range(offset, offset + blk.rows)
        b_piece = tuple(rp.b[r] for r in rows)
        lam_pieces = tuple(tuple(col[r] for r in rows) for col in rp.lambda_cols)
        values: list[Fraction] = []
        supports: list[tuple[int, ...]] = []
        for j in range(blk.cols + 1):
            best_val = None
            best_sup: tuple[int, ...] = ()
            for sup in itertools.combinations(range(blk.cols), j):
                form = residual_quadratic(blk, b_piece, lam_pieces, sup)
                val = eval_form(form, lam)
                if best_val is None or (val, sup) < (best_val, best_sup):
                    best_val, best_sup = val, sup
            assert best_val is not None
            values.append(best_val)
            supports.append(best_sup)
        rows_values.append(tuple(values))
        rows_supports.append(tuple(supports))
        offset += blk.rows
    table = ValTable(tuple(rows_values))
    level = min(rp.sigma_p, table.structure().n_total)
    alloc, value = dp_solve(table, level)
    support: list[int] = []
    col_offset = 0
    for i, blk in enumerate(rp.blocks):
        support.extend(col_offset + c for c in rows_supports[i][alloc[i]])
        col_offset += blk.cols
    return value, tuple(sorted(support))
