"""Problem data types for block-structured subset selection.

An instance is a least squares system ``min |M x + c mu - b|^2`` subject to a
cardinality bound on the support of x, where M consists of a block-diagonal
part (one matrix per block) followed by k dense coupling columns, and c is an
optional intercept column.  Everything is exact: entries are
``fractions.Fraction`` and no float ever enters a computation.

Indices are 0-based throughout the library; the CLI renders them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Rational = Fraction

RationalLike = Union[Fraction, int, str]


class BudgetExceededError(Exception):
    """Raised when an enumeration would pass its configured budget.

    The message names the offending construction (arrangement, oracle
    enumeration, or the subproblem being solved) so callers can report it.
    """


def parse_rational(value: RationalLike) -> Fraction:
    """Parse a rational from an int, a Fraction, or a string.

    Strings may be integer literals ("-3"), fractions ("5/7"), or decimal
    literals ("0.25"), all read exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    raise ValueError(f"cannot parse rational from {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _freeze_vector(entries: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(e) for e in entries)


@dataclass(frozen=True)
class RatMatrix:
    """Dense exact-rational matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "RatMatrix":
        if not rows:
            raise ValueError("matrix needs at least one row")
        ncols = len(rows[0])
        flat: list[Fraction] = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows in matrix")
            flat.extend(parse_rational(e) for e in row)
        return cls(len(rows), ncols, tuple(flat))

    def __post_init__(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    def at(self, r: int, c: int) -> Fraction:
        return self.entries[r * self.cols + c]

    def row(self, r: int) -> tuple[Fraction, ...]:
        return self.entries[r * self.cols : (r + 1) * self.cols]

    def column(self, c: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[r * self.cols + c] for r in range(self.rows))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(c) for c in range(self.cols)]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(r)) for r in range(self.rows)]


@dataclass(frozen=True)
class BlockStructure:
    """Shape summary of the block-diagonal part.

    theta is the widest block; theta_bar = (theta-1)*theta*(theta+1)/2 is the
    proximity radius used by the separable machinery.
    """

    h: int
    n_vec: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.h != len(self.n_vec):
            raise ValueError("h must equal len(n_vec)")
        if any(n <= 0 for n in self.n_vec):
            raise ValueError("block widths must be positive")

    @property
    def theta(self) -> int:
        return max(self.n_vec)

    @property
    def theta_bar(self) -> int:
        t = self.theta
        return (t - 1) * t * (t + 1) // 2

    @property
    def n_total(self) -> int:
        return sum(self.n_vec)


@dataclass(frozen=True)
class Support:
    """A sorted set of variable indices within a declared range."""

    indices: tuple[int, ...]
    universe: int

    @classmethod
    def of(cls, indices: Iterable[int], universe: int) -> "Support":
        return cls(tuple(sorted(set(indices))), universe)

    def __post_init__(self) -> None:
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("support indices must be sorted and distinct")
        if self.indices and (self.indices[0] < 0 or self.indices[-1] >= self.universe):
            raise ValueError("support index out of range")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


@dataclass(frozen=True)
class Instance:
    """A full subset-selection instance.

    blocks: the block-diagonal part, one RatMatrix per block.
    coupling: k dense columns, each of length sum(m_i).
    intercept: optional extra column whose coefficient mu is never counted
        against the cardinality budget.
    b: right-hand side, length sum(m_i).
    sigma: cardinality budget on the x-part plus coupling coefficients.
    """

    blocks: tuple[RatMatrix, ...]
    coupling: tuple[tuple[Fraction, ...], ...]
    intercept: Optional[tuple[Fraction, ...]]
    b: tuple[Fraction, ...]
    sigma: int

    @classmethod
    def build(
        cls,
        blocks: Sequence[Sequence[Sequence[RationalLike]]],
        coupling: Sequence[Sequence[RationalLike]] = (),
        intercept: Optional[Sequence[RationalLike]] = None,
        b: Sequence[RationalLike] = (),
        sigma: int = 0,
    ) -> "Instance":
        return cls(
            blocks=tuple(RatMatrix.from_rows(rows) for rows in blocks),
            coupling=tuple(_freeze_vector(col) for col in coupling),
            intercept=_freeze_vector(intercept) if intercept is not None else None,
            b=_freeze_vector(b),
            sigma=sigma,
        )

    @property
    def h(self) -> int:
        return len(self.blocks)

    @property
    def m_total(self) -> int:
        return sum(blk.rows for blk in self.blocks)

    @property
    def n_total(self) -> int:
        return sum(blk.cols for blk in self.blocks)

    @property
    def k(self) -> int:
        return len(self.coupling)

    @property
    def d(self) -> int:
        """Number of selectable variables: block columns plus coupling columns."""
        return self.n_total + self.k

    @property
    def has_intercept(self) -> bool:
        return self.intercept is not None

    def structure(self) -> BlockStructure:
        return BlockStructure(self.h, tuple(blk.cols for blk in self.blocks))

    def row_offsets(self) -> list[int]:
        offsets = [0]
        for blk in self.blocks:
            offsets.append(offsets[-1] + blk.rows)
        return offsets

    def col_offsets(self) -> list[int]:
        offsets = [0]
        for blk in self.blocks:
            offsets.append(offsets[-1] + blk.cols)
        return offsets


@dataclass(frozen=True)
class ReducedProblem:
    """One separable subproblem produced by the coupling reduction.

    lambda_cols are the columns whose coefficients become free parameters
    (intercept first when present, then the chosen coupling columns).  tags
    records where each came from: the string "mu" or a 0-based coupling index.
    sigma_p is the residual cardinality budget for the block variables.
    """

    blocks: tuple[RatMatrix, ...]
    b: tuple[Fraction, ...]
    lambda_cols: tuple[tuple[Fraction, ...], ...]
    tags: tuple[Union[str, int], ...]
    sigma_p: int

    def __post_init__(self) -> None:
        if len(self.lambda_cols) != len(self.tags):
            raise ValueError("one tag per lambda column")
        if self.sigma_p < 0:
            raise ValueError("sigma_p must be non-negative")

    @property
    def k_prime(self) -> int:
        return len(self.lambda_cols)

    @property
    def n_total(self) -> int:
        return sum(blk.cols for blk in self.blocks)

    def structure(self) -> BlockStructure:
        return BlockStructure(len(self.blocks), tuple(blk.cols for blk in self.blocks))


@dataclass(frozen=True)
class Solution:
    """A feasible point: x over the d selectable variables, optional mu."""

    x: tuple[Fraction, ...]
    mu: Optional[Fraction]
    objective: Fraction
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        actual = tuple(sorted(i for i, v in enumerate(self.x) if v != 0))
        if set(actual) - set(self.support):
            raise ValueError("support does not cover the nonzero coordinates")


def residual_norm2(instance: Instance, x: Sequence[Fraction], mu: Optional[Fraction]) -> Fraction:
    """Exact squared residual |M x + c mu - b|^2 for a full-length x."""
    if len(x) != instance.d:
        raise ValueError("x must have length d")
    if (mu is None) != (instance.intercept is None):
        raise ValueError("mu must be present exactly when the intercept is")
    total = Fraction(0)
    row_offsets = instance.row_offsets()
    col_offsets = instance.col_offsets()
    n = instance.n_total
    for bi, blk in enumerate(instance.blocks):
        r0 = row_offsets[bi]
        c0 = col_offsets[bi]
        for r in range(blk.rows):
            acc = -instance.b[r0 + r]
            for c in range(blk.cols):
                xv = x[c0 + c]
                if xv:
                    acc += blk.at(r, c) * xv
            for j, col in enumerate(instance.coupling):
                xv = x[n + j]
                if xv:
                    acc += col[r0 + r] * xv
            if instance.intercept is not None and mu is not None and mu != 0:
                acc += instance.intercept[r0 + r] * mu
            total += acc * acc
    return total


def make_solution(
    instance: Instance,
    x: Sequence[Fraction],
    mu: Optional[Fraction],
    support: Iterable[int],
) -> Solution:
    """Build a Solution, recomputing the objective from the fields."""
    obj = residual_norm2(instance, x, mu)
    return Solution(tuple(x), mu, obj, tuple(sorted(set(support))))


def validate(instance: Instance) -> list[str]:
    """Collect structural violations; an empty list means the instance is well formed."""
    problems: list[str] = []
    if not instance.blocks:
        problems.append("instance has no blocks")
        return problems
    m = instance.m_total
    if len(instance.b) != m:
        problems.append(f"b has length {len(instance.b)}, expected {m}")
    for j, col in enumerate(instance.coupling):
        if len(col) != m:
            problems.append(f"coupling column {j} has length {len(col)}, expected {m}")
    if instance.intercept is not None and len(instance.intercept) != m:
        problems.append(f"intercept has length {len(instance.intercept)}, expected {m}")
    if instance.sigma < 0:
        problems.append("sigma is negative")
    if instance.sigma > instance.d:
        problems.append(f"sigma {instance.sigma} exceeds the variable count {instance.d}")
    return problems


def slice_by_block(instance: Instance, vector: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    """Split a stacked row-space vector (length sum m_i) into per-block pieces."""
    if len(vector) != instance.m_total:
        raise ValueError(
            f"vector has length {len(vector)}, expected {instance.m_total}"
        )
    pieces = []
    offsets = instance.row_offsets()
    for bi, blk in enumerate(instance.blocks):
        pieces.append(tuple(vector[offsets[bi] : offsets[bi] + blk.rows]))
    return pieces
