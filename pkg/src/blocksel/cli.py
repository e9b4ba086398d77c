"""Command line for the exact block-structured subset selector.

Subcommands: solve an instance file, get the brute-force reference answer,
compare the two, generate seeded random instances, and print a small
timing table.  Instances travel as JSON documents (see load_instance for
the schema); all reported indices are 1-based.  Exit codes: 0 success,
1 input error, 2 budget exceeded, 3 compare mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    BudgetExceededError,
    Instance,
    Solution,
    format_rational,
    validate,
)
from .oracle import brute_force
from .solver import DEFAULT_MAX_CELLS, solve, solve_detailed

DEFAULT_MAX_ORACLE = 10**6

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_MISMATCH = 3


# --- instance documents ------------------------------------------------------


def load_instance(text: str) -> Instance:
    """Build a validated Instance from its JSON document.

    The document is an object with "blocks" (list of matrices, each a list
    of rows of rationals), "coupling" (list of columns), optional
    "intercept" (column or null), "b" (vector), and "sigma" (integer).
    Rationals may be integers or strings like "3", "-2/7", "0.25"; decimal
    literals in the file are re-read as strings so they stay exact.
    """
    try:
        doc = json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("top-level value must be an object")
    missing = [name for name in ("blocks", "coupling", "b", "sigma") if name not in doc]
    if missing:
        raise ValueError("missing fields: " + ", ".join(missing))
    sigma = doc["sigma"]
    if isinstance(sigma, bool) or not isinstance(sigma, int):
        raise ValueError("sigma must be an integer")
    try:
        instance = Instance.build(
            blocks=doc["blocks"],
            coupling=doc["coupling"],
            intercept=doc.get("intercept"),
            b=doc["b"],
            sigma=sigma,
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc
    problems = validate(instance)
    if problems:
        raise ValueError("; ".join(problems))
    return instance


def dump_instance(instance: Instance) -> str:
    """Serialize an Instance back to its JSON document (round-trip exact)."""
    doc = {
        "blocks": [
            [[format_rational(v) for v in row] for row in blk.to_rows()]
            for blk in instance.blocks
        ],
        "coupling": [[format_rational(v) for v in col] for col in instance.coupling],
        "intercept": (
            None
            if instance.intercept is None
            else [format_rational(v) for v in instance.intercept]
        ),
        "b": [format_rational(v) for v in instance.b],
        "sigma": instance.sigma,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _budget(flag_value: Optional[int], env_name: str, default: int) -> int:
    """Flag wins over the environment override, which wins over the default."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(env_name)
    if env is None:
        return default
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"{env_name} must be an integer, got {env!r}") from None


# --- reports -----------------------------------------------------------------


def _solution_doc(
    instance: Instance, solution: Solution, report: Optional[list[dict]] = None
) -> dict:
    doc = {
        "objective": format_rational(solution.objective),
        "objective_decimal": float(solution.objective),
        "support": [i + 1 for i in sorted(solution.support)],
        "x": [format_rational(v) for v in solution.x],
        "mu": None if solution.mu is None else format_rational(solution.mu),
        "sigma": instance.sigma,
    }
    if report is not None:
        doc["subproblems"] = [
            {
                "coupling": [j + 1 for j in entry["coupling"]],
                "intercept": entry["intercept"],
                "budget": entry["budget"],
                "path": entry["path"],
                "regions": entry["regions"],
                "candidates": entry["candidates"],
                "objective": format_rational(entry["objective"]),
            }
            for entry in report
        ]
    return doc


def _print_solution(
    instance: Instance, solution: Solution, report: Optional[list[dict]] = None
) -> None:
    value = format_rational(solution.objective)
    print(f"objective  {value}  ({float(solution.objective):.6g})")
    support = " ".join(str(i + 1) for i in sorted(solution.support))
    print(f"support    {support if support else '(empty)'}")
    print("x          " + " ".join(format_rational(v) for v in solution.x))
    if instance.k:
        lam = solution.x[instance.n_total :]
        print("coupling   " + " ".join(format_rational(v) for v in lam))
    if solution.mu is not None:
        print(f"mu         {format_rational(solution.mu)}")
    if report is not None:
        scored = sum(entry["candidates"] for entry in report)
        print(f"subproblems {len(report)}  candidates scored {scored}")
        for entry in report:
            cols = ",".join(str(j + 1) for j in entry["coupling"])
            pinned = "+mu" if entry["intercept"] else ""
            print(
                "  coupling=[{}]{} budget={} path={} regions={} candidates={} objective={}".format(
                    cols,
                    pinned,
                    entry["budget"],
                    entry["path"],
                    entry["regions"],
                    entry["candidates"],
                    format_rational(entry["objective"]),
                )
            )


# --- commands ----------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        max_cells = _budget(args.max_cells, "BLOCKSEL_MAX_CELLS", DEFAULT_MAX_CELLS)
        instance = load_instance(_read_source(args.path))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        solution, report = solve_detailed(
            instance, max_cells=max_cells, method=args.method
        )
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        print(json.dumps(_solution_doc(instance, solution, report), indent=2))
    else:
        _print_solution(instance, solution, report)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        max_supports = _budget(args.max_oracle, "BLOCKSEL_MAX_ORACLE", DEFAULT_MAX_ORACLE)
        instance = load_instance(_read_source(args.path))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        solution = brute_force(instance, max_supports=max_supports)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        print(json.dumps(_solution_doc(instance, solution), indent=2))
    else:
        _print_solution(instance, solution)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    """Brute force first, then the solver, so a solver refusal still reports."""
    try:
        max_cells = _budget(args.max_cells, "BLOCKSEL_MAX_CELLS", DEFAULT_MAX_CELLS)
        max_supports = _budget(args.max_oracle, "BLOCKSEL_MAX_ORACLE", DEFAULT_MAX_ORACLE)
        instance = load_instance(_read_source(args.path))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        reference = brute_force(instance, max_supports=max_supports)
    except BudgetExceededError as exc:
        print(f"oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(f"oracle  {format_rational(reference.objective)}", flush=True)
    try:
        solution = solve(instance, max_cells=max_cells)
    except BudgetExceededError as exc:
        print(f"solver budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(f"solver  {format_rational(solution.objective)}")
    if solution.objective == reference.objective:
        print("PASS")
        return EXIT_OK
    print("MISMATCH")
    return EXIT_MISMATCH


def generate_instance(
    blocks: int,
    block_rows: int,
    block_cols: int,
    coupling: int,
    intercept: bool,
    sigma: Optional[int],
    seed: int,
    spread: int,
) -> Instance:
    """Seeded random instance; identical arguments give an identical result.

    Block sizes are uniform on 1..block_rows by 1..block_cols and every
    entry is a ratio p/q with p in [-spread, spread] and q in [1, spread].
    The intercept column, when requested, is all ones.  A missing sigma is
    drawn uniformly from 0..d.
    """
    rng = random.Random(seed)

    def entry() -> Fraction:
        return Fraction(rng.randint(-spread, spread), rng.randint(1, spread))

    sizes = [
        (rng.randint(1, block_rows), rng.randint(1, block_cols))
        for _ in range(blocks)
    ]
    mats = [[[entry() for _ in range(n)] for _ in range(m)] for m, n in sizes]
    m_total = sum(m for m, _ in sizes)
    cols = [[entry() for _ in range(m_total)] for _ in range(coupling)]
    ones = [1] * m_total if intercept else None
    rhs = [entry() for _ in range(m_total)]
    d = sum(n for _, n in sizes) + coupling
    chosen = rng.randint(0, d) if sigma is None else sigma
    return Instance.build(
        blocks=mats, coupling=cols, intercept=ones, b=rhs, sigma=chosen
    )


def cmd_gen(args: argparse.Namespace) -> int:
    if args.blocks < 1 or args.block_rows < 1 or args.block_cols < 1:
        print(
            "error: --blocks, --block-rows, --block-cols must be at least 1",
            file=sys.stderr,
        )
        return EXIT_INPUT
    if args.coupling < 0:
        print("error: --coupling must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    if args.spread < 1:
        print("error: --range must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    instance = generate_instance(
        blocks=args.blocks,
        block_rows=args.block_rows,
        block_cols=args.block_cols,
        coupling=args.coupling,
        intercept=args.intercept,
        sigma=args.sigma,
        seed=args.seed,
        spread=args.spread,
    )
    problems = validate(instance)
    if problems:
        print("error: " + "; ".join(problems), file=sys.stderr)
        return EXIT_INPUT
    text = dump_instance(instance)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


BENCH_CASES = (
    ("diag-tall", "auto", dict(blocks=8, block_rows=1, block_cols=1, coupling=1, intercept=False, sigma=3, seed=11, spread=5)),
    ("diag-conic", "auto", dict(blocks=6, block_rows=1, block_cols=1, coupling=2, intercept=False, sigma=2, seed=12, spread=5)),
    ("blocks-cover", "auto", dict(blocks=3, block_rows=2, block_cols=2, coupling=1, intercept=True, sigma=2, seed=13, spread=3)),
    ("blocks-lifted", "extended", dict(blocks=2, block_rows=2, block_cols=2, coupling=2, intercept=False, sigma=2, seed=14, spread=3)),
)


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        max_cells = _budget(args.max_cells, "BLOCKSEL_MAX_CELLS", DEFAULT_MAX_CELLS)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{'name':<16}{'d':>4}{'sigma':>7}{'objective':>16}{'candidates':>12}{'seconds':>9}")
    for name, method, params in BENCH_CASES:
        instance = generate_instance(**params)
        start = time.perf_counter()
        try:
            solution, report = solve_detailed(
                instance, max_cells=max_cells, method=method
            )
        except BudgetExceededError as exc:
            print(f"{name}: budget exceeded: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        elapsed = time.perf_counter() - start
        scored = sum(entry["candidates"] for entry in report)
        value = format_rational(solution.objective)
        print(
            f"{name:<16}{instance.d:>4}{instance.sigma:>7}{value:>16}{scored:>12}{elapsed:>9.3f}"
        )
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocksel",
        description=(
            "Exact cardinality-constrained least squares on block-diagonal "
            "matrices with coupling columns."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cells_help = f"arrangement cell budget (default {DEFAULT_MAX_CELLS}, env BLOCKSEL_MAX_CELLS)"
    oracle_help = f"support enumeration budget (default {DEFAULT_MAX_ORACLE}, env BLOCKSEL_MAX_ORACLE)"

    ps = sub.add_parser("solve", help="solve an instance exactly")
    ps.add_argument("path", help="instance file, or - for stdin")
    ps.add_argument("--json", action="store_true", help="machine-readable report")
    ps.add_argument(
        "--method",
        choices=("auto", "diagonal", "cover", "extended"),
        default="auto",
        help="force one candidate generator (default auto)",
    )
    ps.add_argument("--max-cells", type=int, default=None, help=cells_help)
    ps.set_defaults(func=cmd_solve)

    po = sub.add_parser("oracle", help="brute-force reference answer")
    po.add_argument("path", help="instance file, or - for stdin")
    po.add_argument("--json", action="store_true", help="machine-readable report")
    po.add_argument("--max-oracle", type=int, default=None, help=oracle_help)
    po.set_defaults(func=cmd_oracle)

    pc = sub.add_parser("compare", help="check solver against brute force")
    pc.add_argument("path", help="instance file, or - for stdin")
    pc.add_argument("--max-cells", type=int, default=None, help=cells_help)
    pc.add_argument("--max-oracle", type=int, default=None, help=oracle_help)
    pc.set_defaults(func=cmd_compare)

    pg = sub.add_parser("gen", help="generate a seeded random instance")
    pg.add_argument("--blocks", type=int, default=3, help="number of diagonal blocks")
    pg.add_argument("--block-rows", type=int, default=2, help="max rows per block")
    pg.add_argument("--block-cols", type=int, default=2, help="max columns per block")
    pg.add_argument("--coupling", type=int, default=0, help="number of coupling columns")
    pg.add_argument(
        "--intercept", action="store_true", help="add an all-ones intercept column"
    )
    pg.add_argument(
        "--sigma", type=int, default=None, help="cardinality budget (default: random in 0..d)"
    )
    pg.add_argument("--seed", type=int, default=0, help="generator seed")
    pg.add_argument(
        "--range",
        dest="spread",
        type=int,
        default=5,
        metavar="R",
        help="entries are p/q with |p| and q at most R",
    )
    pg.add_argument("-o", "--output", default="-", help="output file (default stdout)")
    pg.set_defaults(func=cmd_gen)

    pb = sub.add_parser("bench", help="timing table over fixed seeded instances")
    pb.add_argument("--max-cells", type=int, default=None, help=cells_help)
    pb.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
