"""Exact real-root isolation for integer polynomials.

The sweeps need, for a batch of low-degree polynomials, the sorted distinct
real roots plus rational sample points strictly between consecutive roots.
Roots are kept as exact objects: either a rational value or a squarefree
integer polynomial with an isolating interval that can be refined on demand.
Comparisons, deduplication and separator selection are all decided exactly;
floats never influence a result.

Polynomials are coefficient tuples in increasing degree order, so (c, b, a)
is a x^2 + b x + c.  Positive scaling is ignored everywhere, which lets the
Sturm chains stay in integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

IPoly = tuple[int, ...]


def ipoly_normalize(coeffs: Sequence[int]) -> IPoly:
    """Strip trailing zero coefficients."""
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def ipoly_degree(p: IPoly) -> int:
    return len(p) - 1


def ipoly_primitive(p: IPoly) -> IPoly:
    """Divide out the content, keeping the leading coefficient positive."""
    if not p:
        return p
    g = 0
    for c in p:
        g = math.gcd(g, abs(c))
    if g == 0:
        return ()
    if p[-1] < 0:
        g = -g
    return tuple(c // g for c in p)


def ipoly_derivative(p: IPoly) -> IPoly:
    return ipoly_normalize(tuple(i * p[i] for i in range(1, len(p))))


def ipoly_eval_sign(p: IPoly, point: Fraction) -> int:
    """Sign of p at a rational point, via the integer value p(a/b) * b^deg."""
    if not p:
        return 0
    num, den = point.numerator, point.denominator
    acc = p[-1]
    for i in range(len(p) - 2, -1, -1):
        acc = acc * num + p[i] * den ** (len(p) - 1 - i)
    return (acc > 0) - (acc < 0)


def ipoly_eval(p: IPoly, point: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(p):
        total = total * point + c
    return total


def _frac_polys_to_int(coeffs: Sequence[Fraction]) -> IPoly:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return ipoly_normalize(tuple(int(c * den) for c in coeffs))


def _poly_divmod(
    a: Sequence[Fraction], b: Sequence[Fraction]
) -> tuple[list[Fraction], list[Fraction]]:
    rem = list(a)
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    db = len(b) - 1
    lead = b[-1]
    while len(rem) - 1 >= db and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) - 1 < db or not rem:
            break
        shift = len(rem) - 1 - db
        factor = rem[-1] / lead
        quo[shift] = factor
        for i in range(db + 1):
            rem[shift + i] -= factor * b[i]
        rem.pop()
    while rem and rem[-1] == 0:
        rem.pop()
    return quo, rem


def ipoly_gcd(p: IPoly, q: IPoly) -> IPoly:
    """Primitive gcd of two integer polynomials (Euclid over the rationals)."""
    a = [Fraction(c) for c in p]
    b = [Fraction(c) for c in q]
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if not any(a):
        return ()
    return ipoly_primitive(_frac_polys_to_int(a))


def ipoly_squarefree(p: IPoly) -> IPoly:
    """The squarefree part p / gcd(p, p'), primitive with positive lead."""
    p = ipoly_primitive(ipoly_normalize(p))
    if len(p) <= 1:
        return p
    g = ipoly_gcd(p, ipoly_derivative(p))
    if len(g) <= 1:
        return p
    quo, rem = _poly_divmod([Fraction(c) for c in p], [Fraction(c) for c in g])
    assert not any(rem), "gcd must divide the polynomial"
    return ipoly_primitive(_frac_polys_to_int(quo))


def _positive_scale(p: IPoly) -> IPoly:
    """Divide out the content without touching the sign of the polynomial.

    Sturm chain members may only be scaled by positive constants, so the
    lead-sign normalization of ipoly_primitive must not be used here.
    """
    if not p:
        return p
    g = 0
    for c in p:
        g = math.gcd(g, abs(c))
    return tuple(c // g for c in p)


def _sturm_chain(p: IPoly) -> list[IPoly]:
    chain: list[IPoly] = [p, ipoly_derivative(p)]
    while len(chain[-1]) > 0 and ipoly_degree(chain[-1]) > 0:
        a = [Fraction(c) for c in chain[-2]]
        b = [Fraction(c) for c in chain[-1]]
        _, r = _poly_divmod(a, b)
        if not any(r):
            break
        chain.append(_positive_scale(_frac_polys_to_int([-c for c in r])))
    return [c for c in chain if c]


def _variations(chain: list[IPoly], point: Fraction) -> int:
    signs = []
    for member in chain:
        s = ipoly_eval_sign(member, point)
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: IPoly, lo: Fraction, hi: Fraction, chain=None) -> int:
    """Number of distinct real roots of squarefree p in the open interval (lo, hi).

    Both endpoints must be non-roots of p.
    """
    if chain is None:
        chain = _sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


class AlgebraicNumber:
    """A real root, either exactly rational or isolated by an interval.

    For interval roots, poly is squarefree, primitive, positive-lead; the
    open interval (lo, hi) contains exactly one root of poly and both
    endpoints are non-roots.  refine() halves the interval.
    """

    __slots__ = ("value", "poly", "lo", "hi", "_chain")

    def __init__(
        self,
        value: Optional[Fraction] = None,
        poly: Optional[IPoly] = None,
        lo: Optional[Fraction] = None,
        hi: Optional[Fraction] = None,
    ) -> None:
        self.value = value
        self.poly = poly
        self.lo = lo if value is None else value
        self.hi = hi if value is None else value
        self._chain = None

    @classmethod
    def rational(cls, value: Fraction) -> "AlgebraicNumber":
        return cls(value=Fraction(value))

    @classmethod
    def interval_root(cls, poly: IPoly, lo: Fraction, hi: Fraction) -> "AlgebraicNumber":
        return cls(poly=poly, lo=lo, hi=hi)

    @property
    def is_rational(self) -> bool:
        return self.value is not None

    def approx(self) -> float:
        if self.value is not None:
            return float(self.value)
        return float((self.lo + self.hi) / 2)

    def refine(self) -> None:
        if self.value is not None:
            return
        assert self.poly is not None and self.lo is not None and self.hi is not None
        mid = (self.lo + self.hi) / 2
        s = ipoly_eval_sign(self.poly, mid)
        if s == 0:
            # The single root in the interval turned out to be rational.
            self.value = mid
            self.lo = self.hi = mid
            return
        if s == ipoly_eval_sign(self.poly, self.lo):
            self.lo = mid
        else:
            self.hi = mid

    def refine_below(self, width: Fraction) -> None:
        while self.value is None and (self.hi - self.lo) > width:
            self.refine()

    def cmp(self, other: "AlgebraicNumber") -> int:
        """Exact three-way comparison."""
        if self.value is not None and other.value is not None:
            return (self.value > other.value) - (self.value < other.value)
        if self.value is not None:
            return -other._cmp_rational(self.value)
        if other.value is not None:
            return self._cmp_rational(other.value)
        return self._cmp_interval(other)

    def _cmp_rational(self, r: Fraction) -> int:
        # self is an interval root; decide its position relative to r.
        while True:
            if self.value is not None:
                return (self.value > r) - (self.value < r)
            if r <= self.lo:
                return 1
            if r >= self.hi:
                return -1
            if ipoly_eval_sign(self.poly, r) == 0:
                return 0  # r is the unique root in the interval
            # r is strictly inside but not the root; shrink toward the root.
            self.refine()

    def _cmp_interval(self, other: "AlgebraicNumber") -> int:
        common: Optional[IPoly] = None
        common_checked = False
        while True:
            if self.value is not None or other.value is not None:
                return self.cmp(other)
            if self.hi <= other.lo:
                return -1
            if other.hi <= self.lo:
                return 1
            if not common_checked:
                assert self.poly is not None and other.poly is not None
                g = ipoly_gcd(self.poly, other.poly)
                common = g if ipoly_degree(g) >= 1 else None
                common_checked = True
            if common is not None:
                lo = max(self.lo, other.lo)
                hi = min(self.hi, other.hi)
                if lo < hi and ipoly_eval_sign(common, lo) != 0 and ipoly_eval_sign(common, hi) != 0:
                    if sturm_count(common, lo, hi) >= 1:
                        # The shared root inside both intervals is both numbers.
                        return 0
            self.refine()
            other.refine()

    def __repr__(self) -> str:  # debugging aid only
        if self.value is not None:
            return f"AlgebraicNumber({self.value})"
        return f"AlgebraicNumber({self.poly}, ({self.lo}, {self.hi}))"


def _root_bound(p: IPoly) -> Fraction:
    lead = abs(p[-1])
    biggest = max(abs(c) for c in p[:-1]) if len(p) > 1 else 0
    return Fraction(biggest, lead) + 1


def isolate_real_roots(poly: Sequence[int]) -> list[AlgebraicNumber]:
    """All distinct real roots of a nonzero integer polynomial, sorted."""
    p = ipoly_squarefree(ipoly_normalize(tuple(poly)))
    if not p:
        raise ValueError("cannot isolate roots of the zero polynomial")
    if ipoly_degree(p) == 0:
        return []
    if ipoly_degree(p) == 1:
        return [AlgebraicNumber.rational(Fraction(-p[0], p[1]))]
    if ipoly_degree(p) == 2:
        return _quadratic_roots(p)
    chain = _sturm_chain(p)
    bound = _root_bound(p)
    lo, hi = -bound, bound
    # Endpoints beyond the Cauchy bound are never roots.
    roots: list[AlgebraicNumber] = []

    def recurse(a: Fraction, b: Fraction, count: int) -> None:
        if count == 0:
            return
        if count == 1:
            roots.append(AlgebraicNumber.interval_root(p, a, b))
            return
        mid = (a + b) / 2
        if ipoly_eval_sign(p, mid) == 0:
            roots.append(AlgebraicNumber.rational(mid))
            # Shrink a hole around mid until it isolates only that root.
            w = (b - a) / 4
            while True:
                m_lo, m_hi = mid - w, mid + w
                if (
                    ipoly_eval_sign(p, m_lo) != 0
                    and ipoly_eval_sign(p, m_hi) != 0
                    and sturm_count(p, m_lo, m_hi, chain) == 1
                ):
                    break
                w /= 2
            left = sturm_count(p, a, m_lo, chain)
            recurse(a, m_lo, left)
            recurse(m_hi, b, sturm_count(p, m_hi, b, chain))
            return
        left = sturm_count(p, a, mid, chain)
        recurse(a, mid, left)
        recurse(mid, b, count - left)

    recurse(lo, hi, sturm_count(p, lo, hi, chain))
    roots.sort(key=lambda r: r.approx())
    # Approximate sort is fine here: isolation intervals of the same
    # polynomial are pairwise disjoint, so midpoints order correctly once
    # rational roots are inside no interval.  Guard with an exact pass.
    for i in range(len(roots) - 1):
        if roots[i].cmp(roots[i + 1]) >= 0:
            roots.sort(key=_exact_sort_key(roots))
            break
    return roots


def _exact_sort_key(roots: list[AlgebraicNumber]):
    import functools

    return functools.cmp_to_key(lambda a, b: a.cmp(b))


def _quadratic_roots(p: IPoly) -> list[AlgebraicNumber]:
    c, b, a = p[0], p[1], p[2]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    if disc == 0:
        return [AlgebraicNumber.rational(Fraction(-b, 2 * a))]
    s = math.isqrt(disc)
    if s * s == disc:
        r1 = Fraction(-b - s, 2 * a)
        r2 = Fraction(-b + s, 2 * a)
        lo, hi = min(r1, r2), max(r1, r2)
        return [AlgebraicNumber.rational(lo), AlgebraicNumber.rational(hi)]
    # Irrational pair; the quadratic is irreducible, hence squarefree.
    # Use integer brackets of sqrt(disc) for the initial isolation.
    lo_minus = Fraction(-b - (s + 1), 2 * a)
    hi_minus = Fraction(-b - s, 2 * a)
    lo_plus = Fraction(-b + s, 2 * a)
    hi_plus = Fraction(-b + s + 1, 2 * a)
    first = AlgebraicNumber.interval_root(p, min(lo_minus, hi_minus), max(lo_minus, hi_minus))
    second = AlgebraicNumber.interval_root(p, min(lo_plus, hi_plus), max(lo_plus, hi_plus))
    if a < 0:
        first, second = second, first
    return [first, second]


def sort_unique_roots(roots: list[AlgebraicNumber]) -> list[AlgebraicNumber]:
    """Sort a batch of roots from several polynomials and drop duplicates."""
    if not roots:
        return []
    import functools

    ordered = sorted(roots, key=functools.cmp_to_key(lambda a, b: a.cmp(b)))
    unique = [ordered[0]]
    for r in ordered[1:]:
        if unique[-1].cmp(r) != 0:
            unique.append(r)
    return unique


def separating_samples(sorted_roots: list[AlgebraicNumber]) -> list[Fraction]:
    """Rational points: one strictly below, between, and above the given roots.

    The roots must be sorted, distinct, and are refined as needed so that
    consecutive isolating intervals are disjoint.
    """
    if not sorted_roots:
        return [Fraction(0)]
    samples: list[Fraction] = [sorted_roots[0].lo - 1]
    for left, right in zip(sorted_roots, sorted_roots[1:]):
        while not left.hi < right.lo:
            left.refine()
            right.refine()
        samples.append(Fraction(left.hi + right.lo, 2))
    samples.append(sorted_roots[-1].hi + 1)
    return samples
