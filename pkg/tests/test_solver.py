import itertools
import random
from fractions import Fraction

import pytest

from blocksel.linalg import eval_form, least_squares, linearize, residual_quadratic
from blocksel.model import BudgetExceededError, Instance, ReducedProblem
from blocksel.oracle import brute_force, brute_force_levels, fixed_lambda_opt
from blocksel.separable import diag_greedy
from blocksel.solver import (
    build_support_tables,
    finish,
    reduce,
    solve,
    solve_block,
    solve_detailed,
    solve_diagonal,
)


def rp_1x1(values, b, lambda_cols=(), tags=(), sigma_p=0):
    return ReducedProblem(
        blocks=tuple(Instance.build([[[v]] for v in values]).blocks),
        b=tuple(Fraction(v) for v in b),
        lambda_cols=tuple(tuple(Fraction(v) for v in col) for col in lambda_cols),
        tags=tuple(tags),
        sigma_p=sigma_p,
    )


def rp_oracle(rp):
    """Minimum over all feasible supports, with the free columns always in."""
    m = len(rp.b)
    cols = []
    r0 = 0
    for blk in rp.blocks:
        for c in range(blk.cols):
            col = [Fraction(0)] * m
            for r in range(blk.rows):
                col[r0 + r] = blk.at(r, c)
            cols.append(tuple(col))
        r0 += blk.rows
    best = None
    for size in range(min(rp.sigma_p, rp.n_total) + 1):
        for sup in itertools.combinations(range(rp.n_total), size):
            chosen = [cols[i] for i in sup] + list(rp.lambda_cols)
            _, res2 = least_squares(chosen, rp.b)
            if best is None or res2 < best:
                best = res2
    return best


def random_instance(rng, max_blocks=3, max_rows=2, max_cols=2, k=1, intercept=False):
    def entry():
        return Fraction(rng.randint(-3, 3), rng.randint(1, 3))

    blocks = []
    for _ in range(rng.randint(1, max_blocks)):
        rows = rng.randint(1, max_rows)
        cols = rng.randint(1, max_cols)
        blocks.append([[entry() for _ in range(cols)] for _ in range(rows)])
    m = sum(len(blk) for blk in blocks)
    coupling = [[entry() for _ in range(m)] for _ in range(k)]
    inter = [entry() for _ in range(m)] if intercept else None
    b = [entry() for _ in range(m)]
    d = sum(len(blk[0]) for blk in blocks) + k
    sigma = rng.randint(0, d)
    return Instance.build(blocks, coupling, inter, b, sigma)


def test_reduce_counts_and_order():
    base = dict(blocks=[[[1]], [[1]]], b=[1, 2])
    one = reduce(Instance.build(coupling=[[1, 1]], sigma=1, **base))
    assert [(rp.tags, rp.sigma_p) for rp in one] == [((), 1), ((0,), 0)]
    only_mu = reduce(Instance.build(intercept=[1, 1], sigma=1, **base))
    assert [(rp.tags, rp.sigma_p) for rp in only_mu] == [(("mu",), 1)]
    two = reduce(Instance.build(coupling=[[1, 1], [1, 2]], sigma=1, **base))
    assert [rp.tags for rp in two] == [(), (0,), (1,)]


def test_reduce_keeps_intercept_first():
    inst = Instance.build(
        [[[1]], [[1]]], coupling=[[1, 1]], intercept=[1, 1], b=[1, 2], sigma=1
    )
    rps = reduce(inst)
    assert rps[1].tags == ("mu", 0)
    assert rps[1].lambda_cols[0] == inst.intercept


def test_solve_identity_plus_coupling():
    build = lambda sigma: Instance.build(
        [[[1]], [[1]]], coupling=[[1, 1]], b=[2, 1], sigma=sigma
    )
    assert solve(build(0)).objective == 5
    sol = solve(build(1))
    assert sol.objective == Fraction(1, 2)
    assert sol.support == (2,)
    assert sol.x == (0, 0, Fraction(3, 2))
    assert solve(build(2)).objective == 0


def test_solve_rejects_invalid_instances():
    bad = Instance.build([[[1]], [[1]]], b=[1], sigma=0)
    with pytest.raises(ValueError):
        solve(bad)


def test_finish_empty_support_only():
    rp = rp_1x1((1, 1), (3, 4))
    sol = finish(set(), rp)
    assert sol.objective == 25
    assert sol.support == ()


def test_finish_drops_the_larger_residual():
    rp = rp_1x1((1, 1), (3, 4), sigma_p=1)
    sol = finish({(0,), (1,)}, rp)
    assert sol.objective == 9
    assert sol.support == (1,)
    assert sol.x == (0, 4)


def test_finish_joint_block_and_free_solve():
    rp = rp_1x1((1, 1), (2, 1), lambda_cols=[(1, 1)], tags=(0,), sigma_p=1)
    sol = finish({(0,)}, rp)
    assert sol.objective == 0
    assert sol.x == (1, 0)
    assert sol.lam == (1,)


def test_finish_rejects_oversized_candidates():
    rp = rp_1x1((1, 1), (3, 4), sigma_p=1)
    with pytest.raises(ValueError):
        finish({(0, 1)}, rp)


def test_diagonal_breakpoint_example():
    rp = rp_1x1((1, 1), (1, 0), lambda_cols=[(1, -1)], tags=(0,), sigma_p=1)
    candidates, sol = solve_diagonal(rp)
    assert candidates == {(0,), (1,)}
    assert sol.objective == 0
    assert sol.support == (0,)


def test_diagonal_zero_budget():
    rp = rp_1x1((1, 1), (1, 0), lambda_cols=[(1, -1)], tags=(0,), sigma_p=0)
    candidates, sol = solve_diagonal(rp)
    assert candidates == {()}
    assert sol.objective == Fraction(1, 2)


def test_diagonal_requires_unit_blocks():
    rp = ReducedProblem(
        blocks=Instance.build([[[1], [1]]]).blocks,
        b=(Fraction(1), Fraction(2)),
        lambda_cols=(),
        tags=(),
        sigma_p=1,
    )
    with pytest.raises(ValueError):
        solve_diagonal(rp)


def test_diagonal_without_lambda_matches_greedy():
    a = (Fraction(1), Fraction(2), Fraction(0), Fraction(-1))
    b = (Fraction(3), Fraction(-4), Fraction(5), Fraction(1))
    for sigma in range(5):
        rp = rp_1x1(a, b, sigma_p=sigma)
        _, sol = solve_diagonal(rp)
        _, greedy_obj, _ = diag_greedy(a, b, sigma)
        assert sol.objective == greedy_obj


def test_block_column_pair_example():
    rp = ReducedProblem(
        blocks=Instance.build([[[1], [1]], [[1], [1]]]).blocks,
        b=(Fraction(0), Fraction(2), Fraction(0), Fraction(2)),
        lambda_cols=((Fraction(1), Fraction(0), Fraction(1), Fraction(0)),),
        tags=(0,),
        sigma_p=1,
    )
    _, sol = solve_block(rp)
    assert sol.objective == rp_oracle(rp)


def test_block_methods_agree_on_diagonal():
    rng = random.Random(7)
    for _ in range(10):
        h = rng.randint(1, 3)
        k = rng.randint(0, 2)
        a = [Fraction(rng.randint(-2, 2)) for _ in range(h)]
        b = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(h)]
        cols = [
            tuple(Fraction(rng.randint(-2, 2)) for _ in range(h)) for _ in range(k)
        ]
        rp = rp_1x1(a, b, lambda_cols=cols, tags=tuple(range(k)),
                    sigma_p=rng.randint(0, h))
        _, diag_sol = solve_diagonal(rp)
        for method in ("cover", "extended") if k <= 2 else ("extended",):
            _, block_sol = solve_block(rp, method=method)
            assert block_sol.objective == diag_sol.objective


def test_block_without_lambda_matches_dp():
    rp = ReducedProblem(
        blocks=Instance.build([[[1, 2]], [[1], [1]]]).blocks,
        b=(Fraction(3), Fraction(1), Fraction(2)),
        lambda_cols=(),
        tags=(),
        sigma_p=2,
    )
    _, sol = solve_block(rp)
    value, _ = fixed_lambda_opt(rp, ())
    assert sol.objective == value


def test_support_tables_single_column_block():
    rp = ReducedProblem(
        blocks=Instance.build([[[1]]]).blocks,
        b=(Fraction(2),),
        lambda_cols=((Fraction(1),),),
        tags=(0,),
        sigma_p=1,
    )
    cells, tables = build_support_tables(rp)
    assert len(cells) == 1
    assert tables[0].selections == (((), (0,)),)


def test_support_tables_pick_argmin_at_witness():
    blk_rows = [[Fraction(1), Fraction(2)], [Fraction(0), Fraction(1)]]
    rp = ReducedProblem(
        blocks=Instance.build([blk_rows]).blocks,
        b=(Fraction(1), Fraction(3)),
        lambda_cols=((Fraction(1), Fraction(-1)),),
        tags=(0,),
        sigma_p=1,
    )
    cells, tables = build_support_tables(rp)
    assert len(cells) >= 2
    blk = rp.blocks[0]
    forms = {
        sup: residual_quadratic(
            blk, rp.b, (rp.lambda_cols[0],), sup
        )
        for sup in ((0,), (1,))
    }
    for cell, table in zip(cells, tables):
        values = {
            sup: linearize(form).eval(cell.witness)
            for sup, form in forms.items()
        }
        winner = table.selections[0][1]
        assert values[winner] == min(values.values())


def test_solve_matches_brute_force_on_small_instances():
    rng = random.Random(21)
    for trial in range(12):
        inst = random_instance(
            rng, k=rng.randint(0, 1), intercept=rng.random() < 0.5
        )
        assert solve(inst).objective == brute_force(inst).objective


def test_candidate_union_covers_oracle_support():
    rng = random.Random(5)
    for _ in range(8):
        inst = random_instance(rng, max_blocks=2, k=1)
        best = brute_force(inst)
        pool = set()
        for rp in reduce(inst):
            diagonal = all(b.rows == 1 and b.cols == 1 for b in rp.blocks)
            if diagonal:
                candidates, _ = solve_diagonal(rp)
            else:
                candidates, _ = solve_block(rp)
            chosen = frozenset(tag for tag in rp.tags if tag != "mu")
            for chi in candidates:
                pool.add((chosen, frozenset(chi)))
        block_part = frozenset(i for i in best.support if i < inst.n_total)
        coupling_part = frozenset(
            i - inst.n_total for i in best.support if i >= inst.n_total
        )
        assert any(
            chosen == coupling_part and block_part <= chi
            for chosen, chi in pool
        )


def test_budget_error_names_the_subproblem():
    inst = Instance.build(
        [[[1]], [[1]]],
        coupling=[[1, 2], [2, 1], [1, -1]],
        b=[1, 2],
        sigma=3,
    )
    with pytest.raises(BudgetExceededError) as excinfo:
        solve(inst, max_cells=1)
    assert "coupling columns [0, 1, 2]" in str(excinfo.value)


def test_objective_monotone_and_exhaustive_at_full_budget():
    inst = Instance.build(
        [[[1, 2], [3, 4]], [[2], [1]]],
        coupling=[[1, 0, 1, 0]],
        b=[1, 2, 3, 4],
        sigma=0,
    )
    values = []
    for sigma in range(inst.d + 1):
        values.append(solve(Instance.build(
            [[[1, 2], [3, 4]], [[2], [1]]],
            coupling=[[1, 0, 1, 0]],
            b=[1, 2, 3, 4],
            sigma=sigma,
        )).objective)
    assert all(a >= b for a, b in zip(values, values[1:]))
    cols = [
        (1, 3, 0, 0), (2, 4, 0, 0), (0, 0, 2, 1), (1, 0, 1, 0),
    ]
    cols = [tuple(Fraction(v) for v in col) for col in cols]
    _, res2 = least_squares(cols, tuple(Fraction(v) for v in (1, 2, 3, 4)))
    assert values[-1] == res2


def test_solve_detailed_report_shape():
    inst = Instance.build(
        [[[1, 2], [3, 4]], [[2], [1]]],
        coupling=[[1, 0, 1, 0]],
        intercept=[1, 1, 1, 1],
        b=[1, 2, 3, 4],
        sigma=2,
    )
    sol, report = solve_detailed(inst)
    assert len(report) == 2
    assert [entry["coupling"] for entry in report] == [[], [0]]
    assert all(entry["intercept"] for entry in report)
    assert [entry["budget"] for entry in report] == [2, 1]
    assert all(entry["path"] in ("diagonal", "cover", "extended") for entry in report)
    assert all(entry["regions"] >= 1 for entry in report)
    assert all(entry["candidates"] >= 1 for entry in report)
    assert min(entry["objective"] for entry in report) == sol.objective
    assert sol.objective == brute_force(inst).objective


def test_solve_detailed_diagonal_path_label():
    inst = Instance.build(
        [[[1]], [[2]]], coupling=[[1, 1]], b=[1, 2], sigma=1
    )
    _, report = solve_detailed(inst)
    assert {entry["path"] for entry in report} == {"diagonal"}
