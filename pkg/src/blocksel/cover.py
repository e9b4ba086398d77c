"""Rational witness points covering two-parameter sign arrangements.

The solver needs, for a family of curves in the (lambda_1, lambda_2) plane,
a finite set of rational points that hits every open region on which all
family members keep a constant sign.  Two generators live here:

* line_cover_points: for families of lines.  Every open cell of a line
  arrangement has an edge on its boundary; nudging an interior point of
  each edge to both sides lands a witness in every cell.

* conic_cover_points: for families of degree-at-most-2 curves, by
  cylindrical decomposition.  Critical lambda_1 values (discriminants,
  leading coefficients, vertical components, pairwise resultants) split the
  axis into strips; inside a strip every curve is a union of non-crossing
  graphs over lambda_1, so sweeping one rational vertical line per strip
  reaches every region.

Every returned point avoids the zero set of every family member that
vanishes anywhere, so comparisons made at a witness are strict.  Members
that never vanish are dropped: they cannot change sign or create ties.
Both generators may return extra points (several per region, or in regions
no optimum uses); downstream consumers only collect candidate supports per
point, so extras cost time, never correctness.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .linalg import LinearFunctional, QuadraticForm
from .model import BudgetExceededError
from .roots import (
    IPoly,
    ipoly_normalize,
    isolate_real_roots,
    separating_samples,
    sort_unique_roots,
)

MAX_CONICS = 256

Point2 = tuple[Fraction, Fraction]


def line_cover_points(lines: Sequence[LinearFunctional]) -> list[Point2]:
    """Witnesses for every open cell of a line arrangement in the plane.

    Lines are functionals a*x + b*y + c; zero functionals are ignored and
    coincident lines are merged.  Offsets are sized exactly so that each
    emitted point crosses only the host line of its edge.  Canonical lines
    have coprime integer coefficients, which keeps the inner loops in
    integer arithmetic.
    """
    canon: dict[tuple, tuple[int, int, int]] = {}
    for f in lines:
        if len(f.coeffs) != 2 and not f.is_zero():
            raise ValueError("line cover expects functionals in two variables")
        if all(a == 0 for a in f.coeffs):
            # Constant functionals keep one sign everywhere: no line to cross.
            continue
        c = f.canonical()
        canon[(c.coeffs, c.const)] = (int(c.coeffs[0]), int(c.coeffs[1]), int(c.const))
    family = list(canon.values())
    if not family:
        return [(Fraction(0), Fraction(0))]

    points: list[Point2] = []
    seen: set[Point2] = set()

    for a, b, c in family:
        direction = (-b, a)
        if b != 0:
            base = (Fraction(0), Fraction(-c, b))
            den0 = b
        else:
            base = (Fraction(-c, a), Fraction(0))
            den0 = a
        # For a point at parameter t on the host, each other line g takes the
        # value (alpha_scaled + beta * den0 * t) / den0, all integers besides t.
        others: list[tuple[int, int, int]] = []
        params: list[Fraction] = []
        for a2, b2, c2 in family:
            det = a * b2 - b * a2
            alpha_scaled = (
                b2 * (-c) + c2 * b if b != 0 else a2 * (-c) + c2 * a
            )
            rate = a2 * a + b2 * b
            others.append((alpha_scaled, (b2 * a - a2 * b) * den0, rate))
            if det == 0:
                continue
            if b != 0:
                params.append(Fraction(b2 * c - b * c2, det * b))
            else:
                params.append(Fraction(c * a2 - c2 * a, det * a))
        params = sorted(set(params))
        if params:
            anchors = [params[0] - 1]
            anchors += [(u + v) / 2 for u, v in zip(params, params[1:])]
            anchors.append(params[-1] + 1)
        else:
            anchors = [Fraction(0)]
        abs_den0 = abs(den0)
        for t in anchors:
            u, w = t.numerator, t.denominator
            best_num = 0
            best_den = 0
            for alpha_scaled, beta_den0, rate in others:
                if rate == 0:
                    continue
                value_scaled = alpha_scaled * w + beta_den0 * u
                if value_scaled == 0:
                    continue
                num = abs(value_scaled)
                den = 2 * abs(rate) * abs_den0 * w
                if best_den == 0 or num * best_den < best_num * den:
                    best_num, best_den = num, den
            eps = Fraction(best_num, best_den) if best_den else Fraction(1)
            mid = (base[0] + t * direction[0], base[1] + t * direction[1])
            for s in (eps, -eps):
                pt = (mid[0] + s * a, mid[1] + s * b)
                if pt not in seen:
                    seen.add(pt)
                    points.append(pt)
    return points


# --- conic machinery -------------------------------------------------------

Conic = tuple[int, int, int, int, int, int]
# (a, b, c, d, e, f) encoding a x^2 + b xy + c y^2 + d x + e y + f.


def conic_from_form(form: QuadraticForm) -> Conic:
    """Integer-normalized conic from a two-variable quadratic form."""
    if form.dim != 2:
        raise ValueError("expected a two-variable form")
    raw = (
        form.p[0][0],
        2 * form.p[0][1],
        form.p[1][1],
        form.r[0],
        form.r[1],
        form.s0,
    )
    den = 1
    for v in raw:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in raw]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g == 0:
        return (0, 0, 0, 0, 0, 0)
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        g = -g
    return tuple(v // g for v in ints)  # type: ignore[return-value]


def _unonneg(gamma: int, beta: int, alpha: int) -> bool:
    """Does alpha x^2 + beta x + gamma take a value >= 0 somewhere?"""
    if alpha > 0:
        return True
    if alpha == 0:
        return beta != 0 or gamma >= 0
    return beta * beta - 4 * alpha * gamma >= 0


def _disc_in_y(conic: Conic) -> tuple[int, int, int]:
    a, b, c, d, e, f = conic
    return (e * e - 4 * c * f, 2 * b * e - 4 * c * d, b * b - 4 * c * a)


def _disc_in_x(conic: Conic) -> tuple[int, int, int]:
    a, b, c, d, e, f = conic
    return (d * d - 4 * a * f, 2 * b * d - 4 * a * e, b * b - 4 * a * c)


def vanishes_somewhere(conic: Conic) -> bool:
    """True when the conic's real zero set is nonempty.

    Members that never vanish keep one strict sign on the whole plane, so
    they neither bound a region nor tie any comparison; the caller drops
    them.  Everything else stays, even semidefinite members whose zero set
    is a line or a point: witnesses must steer around those too.
    """
    a, b, c, d, e, f = conic
    if c != 0:
        return _unonneg(*_disc_in_y(conic))
    if a != 0:
        return _unonneg(*_disc_in_x(conic))
    if b != 0:
        return True
    if d != 0 or e != 0:
        return True
    return f == 0


def _perfect_square_quadratic(u: tuple[int, int, int]) -> Optional[tuple[int, int]]:
    """If gamma + beta x + alpha x^2 == (q + p x)^2, return (q, p)."""
    gamma, beta, alpha = u
    if alpha < 0 or gamma < 0:
        return None
    p = math.isqrt(alpha)
    q = math.isqrt(gamma)
    if p * p != alpha or q * q != gamma:
        return None
    if beta == 2 * p * q:
        return (q, p)
    if beta == -2 * p * q and (p == 0 or q == 0):
        return (q, p)
    if beta == -2 * p * q:
        return (-q, p)
    return None


def split_rational_lines(conic: Conic) -> list[Conic]:
    """Factor a conic into rational lines when possible.

    Returns the component list (two lines) or the conic itself.  Working
    with components keeps pairwise resultants nonzero, which the strip
    decomposition relies on.
    """
    a, b, c, d, e, f = conic
    if c != 0:
        square = _perfect_square_quadratic(_disc_in_y(conic))
        if square is None:
            return [conic]
        q, p = square
        return [
            _normalize_conic((0, 0, 0, b - p, 2 * c, e - q)),
            _normalize_conic((0, 0, 0, b + p, 2 * c, e + q)),
        ]
    if a != 0:
        square = _perfect_square_quadratic(_disc_in_x(conic))
        if square is None:
            return [conic]
        q, p = square
        return [
            _normalize_conic((0, 0, 0, 2 * a, b - p, d - q)),
            _normalize_conic((0, 0, 0, 2 * a, b + p, d + q)),
        ]
    if b != 0:
        if b * f == d * e:
            return [
                _normalize_conic((0, 0, 0, b, 0, e)),
                _normalize_conic((0, 0, 0, 0, b, d)),
            ]
        return [conic]
    return [conic]


def _normalize_conic(conic: Conic) -> Conic:
    g = 0
    for v in conic:
        g = math.gcd(g, abs(v))
    if g == 0:
        return conic
    lead = next(v for v in conic if v != 0)
    if lead < 0:
        g = -g
    return tuple(v // g for v in conic)  # type: ignore[return-value]


def _y_degree(conic: Conic) -> int:
    a, b, c, d, e, f = conic
    if c != 0:
        return 2
    if b != 0 or e != 0:
        return 1
    return 0


def _padd(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    n = max(len(u), len(v))
    return tuple(
        (u[i] if i < len(u) else 0) + (v[i] if i < len(v) else 0) for i in range(n)
    )


def _pmul(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    if not u or not v:
        return ()
    out = [0] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                out[i + j] += ui * vj
    return tuple(out)


def _pneg(u: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in u)


def _y_view(conic: Conic) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Coefficients of y^2, y^1, y^0 as integer polynomials in x."""
    a, b, c, d, e, f = conic
    return ((c,), (e, b), (f, d, a))


@lru_cache(maxsize=4096)
def _resultant_in_y(c1: Conic, c2: Conic) -> tuple[int, ...]:
    """Resultant of two conics with respect to y: an integer polynomial in x."""
    d1, d2 = _y_degree(c1), _y_degree(c2)
    if d1 < d2:
        c1, c2 = c2, c1
        d1, d2 = d2, d1
    a1, b1, g1 = _y_view(c1)
    a2, b2, g2 = _y_view(c2)
    if d1 == 2 and d2 == 2:
        ac = _padd(_pmul(a1, g2), _pneg(_pmul(a2, g1)))
        ab = _padd(_pmul(a1, b2), _pneg(_pmul(a2, b1)))
        bc = _padd(_pmul(b1, g2), _pneg(_pmul(b2, g1)))
        return ipoly_normalize(_padd(_pmul(ac, ac), _pneg(_pmul(ab, bc))))
    if d1 == 2 and d2 == 1:
        term = _padd(
            _pmul(a1, _pmul(g2, g2)),
            _pneg(_pmul(b1, _pmul(b2, g2))),
        )
        return ipoly_normalize(_padd(term, _pmul(g1, _pmul(b2, b2))))
    if d1 == 1 and d2 == 1:
        return ipoly_normalize(_padd(_pmul(b1, g2), _pneg(_pmul(b2, g1))))
    raise ValueError("resultant needs both members to involve y")


def conic_cover_points(forms: Iterable[QuadraticForm]) -> list[Point2]:
    """Witnesses hitting every open sign-invariant region of the family."""
    family: list[Conic] = []
    seen: set[Conic] = set()
    for form in forms:
        conic = conic_from_form(form)
        if all(v == 0 for v in conic):
            continue
        for part in split_rational_lines(conic):
            if not vanishes_somewhere(part):
                continue
            if part not in seen:
                seen.add(part)
                family.append(part)
    if not family:
        return [(Fraction(0), Fraction(0))]
    if len(family) > MAX_CONICS:
        raise BudgetExceededError(
            f"conic family of size {len(family)} exceeds the limit of {MAX_CONICS}"
        )

    criticals = []
    positives = [c for c in family if _y_degree(c) >= 1]
    for conic in family:
        deg = _y_degree(conic)
        if deg == 2:
            disc = ipoly_normalize(_disc_in_y(conic))
            assert disc, "kept quadratic-in-y conics have nonzero discriminant"
            if len(disc) > 1:
                criticals.extend(isolate_real_roots(disc))
        elif deg == 1:
            lead = ipoly_normalize((conic[4], conic[1]))  # e + b x
            if len(lead) > 1:
                criticals.extend(isolate_real_roots(lead))
        else:
            vertical = ipoly_normalize((conic[5], conic[3], conic[0]))
            assert vertical, "a zero conic cannot reach the family"
            if len(vertical) > 1:
                criticals.extend(isolate_real_roots(vertical))
    for i in range(len(positives)):
        for j in range(i + 1, len(positives)):
            res = _resultant_in_y(positives[i], positives[j])
            assert res, "distinct components must have nonzero resultant"
            if len(res) > 1:
                criticals.extend(isolate_real_roots(res))

    strip_xs = separating_samples(sort_unique_roots(criticals))
    points: list[Point2] = []
    for w in strip_xs:
        roots = []
        for conic in family:
            a, b, c, d, e, f = conic
            coeffs = (
                Fraction(a * w * w + d * w + f),
                Fraction(b * w + e),
                Fraction(c),
            )
            den = 1
            for v in coeffs:
                den = den * v.denominator // math.gcd(den, v.denominator)
            poly = ipoly_normalize(tuple(int(v * den) for v in coeffs))
            if len(poly) > 1:
                roots.extend(isolate_real_roots(poly))
        for y in separating_samples(sort_unique_roots(roots)):
            points.append((w, y))
    return points
