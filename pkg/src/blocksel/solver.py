"""Exact solvers for the reduced subproblems and for full instances.

reduce() expands an instance into one subproblem per admissible subset of
coupling columns; the chosen columns' coefficients become free parameters
lambda and the remaining budget sigma' applies to the block variables.
For fixed lambda the objective separates across blocks, so everything
hinges on which support wins each (block, cardinality) slot as lambda
moves.  Those comparisons are quadratic in lambda; the solver covers all
their sign regions with rational witness points, reads off the winning
supports at each witness, and forms candidate supports as unions over
cardinality allocations.  finish() then minimizes each candidate's
residual form over lambda in closed form and keeps the best.

Two candidate generators coexist.  The cover path (up to two parameters)
uses the witness generators from the cover module.  The extended path
lifts the comparisons to linear hyperplanes over the coordinates
(lambda, pairwise products of lambda) and enumerates arrangement cells
exactly; it has no parameter-count limit and doubles as a cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arrangement import (
    Cell,
    Hyperplane,
    enumerate_cells,
    merge_hyperplanes,
    sweep_1d,
)
from .cover import conic_cover_points, line_cover_points
from .linalg import (
    LinearFunctional,
    QuadraticForm,
    eval_form,
    extended_dim,
    least_squares,
    linearize,
    quadratic_minimum,
    residual_quadratic,
)
from .model import (
    BudgetExceededError,
    Instance,
    ReducedProblem,
    Solution,
    make_solution,
    validate,
)
from .separable import ValTable, build_d, chain_solve

DEFAULT_MAX_CELLS = 200000
MAX_PROFILE_UNIONS = 1000000

CandidateSet = set[tuple[int, ...]]


@dataclass(frozen=True)
class RpSolution:
    """Optimum of one reduced subproblem.

    x covers the block variables only; lam holds the free coefficients in
    tag order (intercept first when present).  support lists the chosen
    block variables, sorted.
    """

    x: tuple[Fraction, ...]
    lam: tuple[Fraction, ...]
    objective: Fraction
    support: tuple[int, ...]


@dataclass(frozen=True)
class SupportTable:
    """Winning support per (block, cardinality) slot inside one cell."""

    selections: tuple[tuple[tuple[int, ...], ...], ...]


def reduce(instance: Instance) -> list[ReducedProblem]:
    """All separable subproblems of an instance.

    One per subset L of coupling columns with |L| <= sigma: the lambda
    columns are the intercept (when present) followed by the columns of L,
    and the block budget drops to sigma - |L|.  Ordered by subset size,
    then lexicographically, so the empty subset comes first.
    """
    problems: list[ReducedProblem] = []
    for size in range(min(instance.k, instance.sigma) + 1):
        for combo in itertools.combinations(range(instance.k), size):
            lambda_cols: list[tuple[Fraction, ...]] = []
            tags: list = []
            if instance.intercept is not None:
                lambda_cols.append(instance.intercept)
                tags.append("mu")
            for idx in combo:
                lambda_cols.append(instance.coupling[idx])
                tags.append(idx)
            problems.append(
                ReducedProblem(
                    blocks=instance.blocks,
                    b=instance.b,
                    lambda_cols=tuple(lambda_cols),
                    tags=tuple(tags),
                    sigma_p=instance.sigma - size,
                )
            )
    return problems


# --- cached per-subproblem geometry ----------------------------------------
#
# Everything below is keyed on the subproblem with its budget stripped, so a
# sigma sweep over the same data reuses witnesses, argmin tables, and
# candidate values.


def _strip_budget(rp: ReducedProblem) -> ReducedProblem:
    return replace(rp, sigma_p=0)


def _col_offsets(blocks: Sequence) -> tuple[int, ...]:
    offsets = [0]
    for blk in blocks:
        offsets.append(offsets[-1] + blk.cols)
    return tuple(offsets)


@lru_cache(maxsize=None)
def _row_pieces(base: ReducedProblem):
    """Per block: (piece of b, pieces of each lambda column)."""
    pieces = []
    offset = 0
    for blk in base.blocks:
        rows = range(offset, offset + blk.rows)
        b_piece = tuple(base.b[r] for r in rows)
        lam_pieces = tuple(tuple(col[r] for r in rows) for col in base.lambda_cols)
        pieces.append((b_piece, lam_pieces))
        offset += blk.rows
    return tuple(pieces)


@lru_cache(maxsize=None)
def _support_forms(base: ReducedProblem):
    """All residual forms: entry [i][j] lists (support, form) for block i, size j."""
    pieces = _row_pieces(base)
    out = []
    for i, blk in enumerate(base.blocks):
        b_piece, lam_pieces = pieces[i]
        by_size = []
        for j in range(blk.cols + 1):
            row = tuple(
                (sup, residual_quadratic(blk, b_piece, lam_pieces, sup))
                for sup in itertools.combinations(range(blk.cols), j)
            )
            by_size.append(row)
        out.append(tuple(by_size))
    return tuple(out)


@lru_cache(maxsize=None)
def _form_lookup(base: ReducedProblem) -> tuple[dict, ...]:
    """Per block, a dict from local support tuple to its residual form."""
    return tuple(
        {sup: form for row in rows for sup, form in row}
        for rows in _support_forms(base)
    )


def _difference_forms(base: ReducedProblem) -> list[QuadraticForm]:
    """Nonzero residual differences of same-cardinality supports per block."""
    out = []
    for rows in _support_forms(base):
        for row in rows:
            for (_, f1), (_, f2) in itertools.combinations(row, 2):
                diff = f1.sub(f2)
                if not diff.is_zero():
                    out.append(diff)
    return out


@lru_cache(maxsize=None)
def _cover_witnesses(base: ReducedProblem) -> tuple[tuple[Fraction, ...], ...]:
    """Rational lambda points hitting every sign region of the differences."""
    k = base.k_prime
    if k == 0:
        return ((),)
    diffs = _difference_forms(base)
    if k == 1:
        _, samples = sweep_1d(diffs)
        return tuple((s,) for s in samples)
    if k == 2:
        return tuple(conic_cover_points(diffs))
    raise ValueError("witness covers require at most two free parameters")


def _argmins_at(base: ReducedProblem, witness: Sequence[Fraction]) -> tuple:
    """Winning support per (block, cardinality) at a lambda point.

    The witness never lies on a nonzero difference surface, so ties happen
    only between supports with identical forms; those break to the
    lexicographically smallest support.
    """
    table = []
    for rows in _support_forms(base):
        per_size = tuple(
            min(row, key=lambda sf: (eval_form(sf[1], witness), sf[0]))[0]
            for row in rows
        )
        table.append(per_size)
    return tuple(table)


def _argmins_extended(base: ReducedProblem, point: Sequence[Fraction]) -> tuple:
    """Same as _argmins_at but evaluated at an extended-space point."""
    table = []
    for rows in _support_forms(base):
        per_size = tuple(
            min(row, key=lambda sf: (linearize(sf[1]).eval(point), sf[0]))[0]
            for row in rows
        )
        table.append(per_size)
    return tuple(table)


@lru_cache(maxsize=None)
def _cover_pool(base: ReducedProblem) -> tuple[tuple[int, ...], ...]:
    """Union supports of every argmin profile at every cover witness.

    For each witness the per-block tables are fixed; every cardinality
    allocation contributes the union of its blocks' winning supports.  The
    pool is budget-free: callers filter by their own sigma'.
    """
    profiles = {_argmins_at(base, w) for w in _cover_witnesses(base)}
    offsets = _col_offsets(base.blocks)
    per_witness = math.prod(blk.cols + 1 for blk in base.blocks)
    if per_witness * max(len(profiles), 1) > MAX_PROFILE_UNIONS:
        raise BudgetExceededError(
            f"profile union enumeration needs {per_witness} allocations for "
            f"each of {len(profiles)} argmin tables"
        )
    pool: set[tuple[int, ...]] = set()
    for table in profiles:
        ranges = [range(len(per_size)) for per_size in table]
        for alloc in itertools.product(*ranges):
            chi: list[int] = []
            for i, j in enumerate(alloc):
                chi.extend(offsets[i] + c for c in table[i][j])
            pool.add(tuple(sorted(chi)))
    return tuple(sorted(pool))


@lru_cache(maxsize=None)
def _candidate_value(
    base: ReducedProblem, chi: tuple[int, ...]
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact minimum over lambda of one candidate's residual form."""
    lookup = _form_lookup(base)
    offsets = _col_offsets(base.blocks)
    total = QuadraticForm.zero(base.k_prime)
    for i in range(len(base.blocks)):
        local = tuple(
            c - offsets[i] for c in chi if offsets[i] <= c < offsets[i + 1]
        )
        total = total.add(lookup[i][local])
    return quadratic_minimum(total)


def finish(candidates: Iterable[Sequence[int]], rp: ReducedProblem) -> RpSolution:
    """Best subproblem solution over the candidate supports.

    Each candidate's residual form is minimized over lambda in closed form;
    the empty support always participates.  Ties prefer the
    lexicographically smallest support.  Only the winner gets its block
    coefficients rebuilt, by per-block least squares at the winning lambda.
    """
    pool = {tuple(sorted(chi)) for chi in candidates}
    pool.add(())
    base = _strip_budget(rp)
    best_key = None
    best_lam: tuple[Fraction, ...] = ()
    for chi in sorted(pool):
        if len(chi) > rp.sigma_p:
            raise ValueError("candidate support exceeds the subproblem budget")
        value, lam = _candidate_value(base, chi)
        key = (value, chi)
        if best_key is None or key < best_key:
            best_key, best_lam = key, lam
    assert best_key is not None
    value, chi = best_key

    pieces = _row_pieces(base)
    offsets = _col_offsets(base.blocks)
    x = [Fraction(0)] * rp.n_total
    rebuilt = Fraction(0)
    for i, blk in enumerate(base.blocks):
        local = [c - offsets[i] for c in chi if offsets[i] <= c < offsets[i + 1]]
        b_piece, lam_pieces = pieces[i]
        target = list(b_piece)
        for coeff, piece in zip(best_lam, lam_pieces):
            if coeff:
                for r in range(len(target)):
                    target[r] -= coeff * piece[r]
        coeffs, res2 = least_squares([blk.column(c) for c in local], target)
        for c, v in zip(local, coeffs):
            x[offsets[i] + c] = v
        rebuilt += res2
    assert rebuilt == value, "closed-form value must match the rebuilt residual"
    return RpSolution(tuple(x), best_lam, value, chi)


# --- diagonal specialization ------------------------------------------------


@lru_cache(maxsize=None)
def _diag_rankings(
    base: ReducedProblem, max_cells: int = DEFAULT_MAX_CELLS
) -> tuple[tuple[int, ...], ...]:
    """Orderings of the hittable coordinates seen across all witnesses.

    Coordinates sort by squared adjusted right side |b'(lambda)|^2,
    descending, index ascending; coordinates with a zero diagonal entry are
    left out.  Witness points come from the pairwise difference and sum
    lines of the b' functionals (with the single-coordinate lines along for
    exactness of the orderings).
    """
    h = len(base.blocks)
    pieces = _row_pieces(base)
    funcs = []
    for i in range(h):
        b_piece, lam_pieces = pieces[i]
        coeffs = tuple(-piece[0] for piece in lam_pieces)
        funcs.append(LinearFunctional(coeffs, b_piece[0]))

    sources: list[tuple[LinearFunctional, object]] = []

    def add(func: LinearFunctional, label: object) -> None:
        if any(c != 0 for c in func.coeffs):
            sources.append((func, label))

    for i, j in itertools.combinations(range(h), 2):
        fi, fj = funcs[i], funcs[j]
        minus = LinearFunctional(
            tuple(a - b for a, b in zip(fi.coeffs, fj.coeffs)), fi.const - fj.const
        )
        plus = LinearFunctional(
            tuple(a + b for a, b in zip(fi.coeffs, fj.coeffs)), fi.const + fj.const
        )
        add(minus, ("minus", i, j))
        add(plus, ("plus", i, j))
        add(fi, ("coord", i))
        add(fj, ("coord", j))
    planes = merge_hyperplanes(sources)

    k = base.k_prime
    if k == 0:
        witnesses: list[tuple[Fraction, ...]] = [()]
    elif k == 1:
        lines = [
            QuadraticForm(1, ((Fraction(0),),), (hp.functional.coeffs[0],), hp.functional.const)
            for hp in planes
        ]
        _, samples = sweep_1d(lines)
        witnesses = [(s,) for s in samples]
    elif k == 2:
        witnesses = line_cover_points([hp.functional for hp in planes])
    else:
        cells = enumerate_cells(planes, k, max_cells=max_cells)
        witnesses = [cell.witness for cell in cells]

    # One positive scale factor for all functionals, and one common
    # denominator per witness, keep the ordering loop in integer arithmetic
    # without disturbing any comparison of squared values.
    scale = 1
    for f in funcs:
        for v in (*f.coeffs, f.const):
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    int_funcs = [
        (tuple(int(v * scale) for v in f.coeffs), int(f.const * scale))
        for f in funcs
    ]

    hittable = [i for i in range(h) if base.blocks[i].at(0, 0) != 0]
    rankings: set[tuple[int, ...]] = set()
    for w in witnesses:
        den = 1
        for x in w:
            den = den * x.denominator // math.gcd(den, x.denominator)
        coords = [int(x * den) for x in w]
        vals = []
        for coeffs, const in int_funcs:
            acc = const * den
            for cf, x in zip(coeffs, coords):
                acc += cf * x
            vals.append(acc * acc)
        order = sorted(hittable, key=lambda i: (-vals[i], i))
        rankings.add(tuple(order))
    return tuple(sorted(rankings))


def solve_diagonal(
    rp: ReducedProblem, max_cells: int = DEFAULT_MAX_CELLS
) -> tuple[CandidateSet, RpSolution]:
    """Candidates and optimum for a subproblem whose blocks are all 1x1.

    At any lambda the optimal support is a top slice of the coordinates
    ordered by |b'(lambda)|, restricted to nonzero diagonal entries: each
    inclusion removes that coordinate's squared residual.  One candidate
    per witness ordering suffices.
    """
    for blk in rp.blocks:
        if blk.rows != 1 or blk.cols != 1:
            raise ValueError("solve_diagonal requires 1x1 blocks")
    base = _strip_budget(rp)
    candidates: CandidateSet = set()
    for ranking in _diag_rankings(base, max_cells):
        take = min(rp.sigma_p, len(ranking))
        candidates.add(tuple(sorted(ranking[:take])))
    return candidates, finish(candidates, rp)


# --- general blocks ---------------------------------------------------------


@lru_cache(maxsize=None)
def _support_planes(base: ReducedProblem) -> tuple[Hyperplane, ...]:
    """Hyperplanes of the same-cardinality comparisons in extended space."""
    sources: list[tuple[LinearFunctional, object]] = []
    for i, rows in enumerate(_support_forms(base)):
        for j, row in enumerate(rows):
            for (s1, f1), (s2, f2) in itertools.combinations(row, 2):
                diff = f1.sub(f2)
                if diff.is_zero():
                    continue
                func = linearize(diff)
                if all(c == 0 for c in func.coeffs):
                    continue  # constant sign: no surface to cross
                sources.append((func, (i, j, s1, s2)))
    return tuple(merge_hyperplanes(sources))


def build_support_tables(
    rp: ReducedProblem, max_cells: int = DEFAULT_MAX_CELLS
) -> tuple[list[Cell], list[SupportTable]]:
    """Cells of the lifted comparison arrangement with their argmin tables.

    The comparison surfaces are quadratic in lambda but linear over the
    extended coordinates (lambda, then pairwise products), so cells come
    from exact hyperplane enumeration there.  Within a cell every
    comparison keeps one sign, fixing a winning support per
    (block, cardinality) slot.
    """
    base = _strip_budget(rp)
    planes = _support_planes(base)
    cells = enumerate_cells(planes, extended_dim(rp.k_prime), max_cells=max_cells)
    tables = [
        SupportTable(_argmins_extended(base, cell.witness)) for cell in cells
    ]
    return cells, tables


def _solve_extended(
    rp: ReducedProblem, max_cells: int, stats: dict | None = None
) -> tuple[CandidateSet, RpSolution]:
    """Candidate generation through the extended-space arrangement.

    Per cell, the winning supports induce symbolic cardinality values; the
    exchange set over those values is refined by its pairwise comparison
    hyperplanes, and each refined cell contributes the support realized by
    the incremental chain at the evaluated witness.
    """
    base = _strip_budget(rp)
    planes = _support_planes(base)
    cells, tables = build_support_tables(rp, max_cells=max_cells)
    regions = 0
    lookup = _form_lookup(base)
    offsets = _col_offsets(base.blocks)
    structure = rp.structure()
    level = min(rp.sigma_p, rp.n_total)
    candidates: CandidateSet = set()
    for cell, table in zip(cells, tables):
        sel_forms = [
            [lookup[i][sup] for sup in table.selections[i]]
            for i in range(len(base.blocks))
        ]
        exchanges = build_d(structure, forms=sel_forms)
        sources: list[tuple[LinearFunctional, object]] = []
        for e1, e2 in itertools.combinations(exchanges, 2):
            assert e1.form is not None and e2.form is not None
            diff = e1.form.sub(e2.form)
            if diff.is_zero():
                continue
            func = linearize(diff)
            if all(c == 0 for c in func.coeffs):
                continue
            sources.append((func, (e1.changes, e2.changes)))
        refine = merge_hyperplanes(sources)
        constraints = [
            (hp.functional, sign) for hp, sign in zip(planes, cell.signs)
        ]
        refined = enumerate_cells(
            refine,
            extended_dim(rp.k_prime),
            max_cells=max_cells,
            base=constraints,
            base_witness=cell.witness,
        )
        regions += len(refined)
        for sub in refined:
            pseudo = ValTable(
                tuple(
                    tuple(linearize(f).eval(sub.witness) for f in row)
                    for row in sel_forms
                )
            )
            alloc, _ = chain_solve(pseudo, level)
            chi: list[int] = []
            for i, j in enumerate(alloc):
                chi.extend(offsets[i] + c for c in table.selections[i][j])
            candidates.add(tuple(sorted(chi)))
    if stats is not None:
        stats["regions"] = regions
    return candidates, finish(candidates, rp)


def solve_block(
    rp: ReducedProblem,
    max_cells: int = DEFAULT_MAX_CELLS,
    method: str = "auto",
    stats: dict | None = None,
) -> tuple[CandidateSet, RpSolution]:
    """Candidates and optimum for one reduced subproblem.

    method "cover" reads argmin profiles at witness points (needs at most
    two free parameters); "extended" runs the lifted arrangement
    construction, valid for any parameter count; "auto" picks cover when
    it applies.  A stats dict, when given, receives the region count.
    """
    if method == "auto":
        method = "cover" if rp.k_prime <= 2 else "extended"
    if method == "cover":
        base = _strip_budget(rp)
        limit = min(rp.sigma_p, rp.n_total)
        candidates = {
            chi for chi in _cover_pool(base) if len(chi) <= limit
        }
        if stats is not None:
            stats["regions"] = len(_cover_witnesses(base))
        return candidates, finish(candidates, rp)
    if method == "extended":
        return _solve_extended(rp, max_cells, stats=stats)
    raise ValueError(f"unknown method {method!r}")


def _lift(instance: Instance, rp: ReducedProblem, sol: RpSolution) -> Solution:
    """Map a subproblem optimum back to the instance variables."""
    n = instance.n_total
    x = [Fraction(0)] * instance.d
    for idx, v in enumerate(sol.x):
        x[idx] = v
    mu = None
    support = set(sol.support)
    for tag, coeff in zip(rp.tags, sol.lam):
        if tag == "mu":
            mu = coeff
        else:
            x[n + tag] = coeff
            support.add(n + tag)
    lifted = make_solution(instance, x, mu, support)
    assert lifted.objective == sol.objective, "lifting must preserve the residual"
    return lifted


def solve_detailed(
    instance: Instance,
    max_cells: int = DEFAULT_MAX_CELLS,
    method: str = "auto",
) -> tuple[Solution, list[dict]]:
    """Exact optimum of a full instance, with one stats entry per subproblem.

    Validates, reduces, solves every subproblem with the matching strategy,
    and lifts the best result back.  With method "auto" the all-1x1 case
    takes the diagonal ordering path; "cover", "extended", and "diagonal"
    force one generator everywhere.  Budget overruns are re-raised with the
    offending subproblem named.

    Each stats entry records the coupling columns pinned active, whether
    the intercept was pinned, the residual budget, the strategy used, the
    number of parameter regions inspected, the candidate supports scored,
    and the subproblem's objective.
    """
    problems = validate(instance)
    if problems:
        raise ValueError("; ".join(problems))
    best: Solution | None = None
    report: list[dict] = []
    for rp in reduce(instance):
        diagonal = all(blk.rows == 1 and blk.cols == 1 for blk in rp.blocks)
        entry: dict = {
            "coupling": [tag for tag in rp.tags if tag != "mu"],
            "intercept": "mu" in rp.tags,
            "budget": rp.sigma_p,
        }
        stats: dict = {}
        try:
            if method == "diagonal" or (method == "auto" and diagonal):
                entry["path"] = "diagonal"
                candidates, sol = solve_diagonal(rp, max_cells=max_cells)
                stats["regions"] = len(_diag_rankings(_strip_budget(rp), max_cells))
            else:
                chosen = method
                if method == "auto":
                    chosen = "cover" if rp.k_prime <= 2 else "extended"
                entry["path"] = chosen
                candidates, sol = solve_block(
                    rp, max_cells=max_cells, method=chosen, stats=stats
                )
        except BudgetExceededError as exc:
            active = [tag for tag in rp.tags if tag != "mu"]
            raise BudgetExceededError(
                f"subproblem with coupling columns {active}: {exc}"
            ) from exc
        entry["regions"] = stats["regions"]
        entry["candidates"] = len(candidates)
        entry["objective"] = sol.objective
        report.append(entry)
        lifted = _lift(instance, rp, sol)
        if best is None or lifted.objective < best.objective:
            best = lifted
    assert best is not None, "the empty coupling subset is always present"
    return best, report


def solve(
    instance: Instance,
    max_cells: int = DEFAULT_MAX_CELLS,
    method: str = "auto",
) -> Solution:
    """Exact optimum of a full instance; see solve_detailed for strategy."""
    return solve_detailed(instance, max_cells=max_cells, method=method)[0]
