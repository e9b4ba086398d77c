from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blocksel.arrangement import enumerate_cells, merge_hyperplanes, sign_at
from blocksel.cover import (
    MAX_CONICS,
    conic_cover_points,
    conic_from_form,
    line_cover_points,
    split_rational_lines,
    vanishes_somewhere,
)
from blocksel.linalg import LinearFunctional, QuadraticForm
from blocksel.model import BudgetExceededError

coords = st.fractions(
    min_value=Fraction(-3), max_value=Fraction(3), max_denominator=2
)

small_ints = st.integers(-3, 3)


def functional(coeffs, const):
    return LinearFunctional(
        tuple(Fraction(c) for c in coeffs), Fraction(const)
    )


def form2(a, b, c, d, e, f):
    """Two-variable form a x^2 + b xy + c y^2 + d x + e y + f."""
    half_b = Fraction(b, 2)
    return QuadraticForm(
        2,
        ((Fraction(a), half_b), (half_b, Fraction(c))),
        (Fraction(d), Fraction(e)),
        Fraction(f),
    )


def conic_value(conic, point):
    a, b, c, d, e, f = conic
    x, y = point
    return a * x * x + b * x * y + c * y * y + d * x + e * y + f


def sign(v):
    return (v > 0) - (v < 0)


def test_single_line_both_sides():
    pts = line_cover_points([functional((1, -1), 0)])
    signs = {sign(p[0] - p[1]) for p in pts}
    assert signs == {1, -1}


def test_empty_line_family():
    assert line_cover_points([]) == [(0, 0)]
    assert line_cover_points([functional((0, 0), 5)]) == [(0, 0)]


def test_line_cover_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        line_cover_points([functional((1,), 0)])


def test_line_cover_hits_every_cell():
    funcs = [
        functional((1, 0), 0),
        functional((0, 1), 0),
        functional((1, 1), -1),
        functional((2, -1), 1),
    ]
    planes = merge_hyperplanes([(f, i) for i, f in enumerate(funcs)])
    cells = enumerate_cells(planes, 2)
    pts = line_cover_points(funcs)
    realized = {
        tuple(sign_at(hp.functional, pt) for hp in planes) for pt in pts
    }
    assert 0 not in {s for vec in realized for s in vec}
    assert {cell.signs for cell in cells} <= realized


@given(
    st.lists(
        st.tuples(small_ints, small_ints, small_ints).filter(
            lambda t: t[0] != 0 or t[1] != 0
        ),
        min_size=1,
        max_size=4,
    )
)
def test_line_cover_matches_arrangement(raw):
    funcs = [functional((a, b), c) for a, b, c in raw]
    planes = merge_hyperplanes([(f, i) for i, f in enumerate(funcs)])
    cells = enumerate_cells(planes, 2)
    pts = line_cover_points(funcs)
    for f in funcs:
        for pt in pts:
            assert f.eval(pt) != 0
    realized = {
        tuple(sign_at(hp.functional, pt) for hp in planes) for pt in pts
    }
    assert {cell.signs for cell in cells} <= realized


def test_conic_from_form_normalizes():
    conic = conic_from_form(form2(1, 1, 1, 0, 0, -1))
    assert conic == (1, 1, 1, 0, 0, -1)
    tripled = conic_from_form(form2(3, 3, 3, 0, 0, -3))
    assert tripled == conic
    flipped = conic_from_form(form2(-1, 0, 0, 0, 0, 1))
    assert flipped == (1, 0, 0, 0, 0, -1)


def test_conic_from_form_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        conic_from_form(QuadraticForm.zero(3))


def test_vanishes_somewhere_cases():
    assert vanishes_somewhere(conic_from_form(form2(1, -2, 1, 0, 0, 0)))
    assert not vanishes_somewhere(conic_from_form(form2(1, 0, 0, 0, 0, 1)))
    assert not vanishes_somewhere(conic_from_form(form2(1, 0, 1, 0, 0, 1)))
    assert vanishes_somewhere(conic_from_form(form2(1, 0, 1, 0, 0, 0)))
    assert vanishes_somewhere(conic_from_form(form2(0, 1, 0, 0, 0, 0)))
    assert vanishes_somewhere(conic_from_form(form2(0, 0, 0, 1, 1, 0)))
    assert not vanishes_somewhere((0, 0, 0, 0, 0, 1))


def test_split_difference_of_squares():
    parts = split_rational_lines((1, 0, -1, 0, 0, 0))
    assert set(parts) == {(0, 0, 0, 1, 1, 0), (0, 0, 0, 1, -1, 0)}


def test_split_perfect_square():
    parts = split_rational_lines((1, -2, 1, 0, 0, 0))
    assert set(parts) == {(0, 0, 0, 1, -1, 0)}


def test_split_leaves_irreducibles_alone():
    circle = (1, 0, 1, 0, 0, -1)
    assert split_rational_lines(circle) == [circle]
    hyperbola = (0, 1, 0, 0, 0, -1)
    assert split_rational_lines(hyperbola) == [hyperbola]


def test_split_axes_product():
    parts = split_rational_lines((0, 1, 0, 0, 0, 0))
    assert set(parts) == {(0, 0, 0, 1, 0, 0), (0, 0, 0, 0, 1, 0)}


def test_conic_cover_circle_and_line():
    circle = form2(1, 0, 1, 0, 0, -1)
    line = form2(0, 0, 0, -1, 1, 0)
    pts = conic_cover_points([circle, line])
    family = [conic_from_form(circle), conic_from_form(line)]
    realized = {
        tuple(sign(conic_value(c, pt)) for c in family) for pt in pts
    }
    assert realized == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_conic_cover_parabola():
    pts = conic_cover_points([form2(-1, 0, 0, 0, 1, 0)])
    values = {sign(conic_value((1, 0, 0, 0, -1, 0), pt)) for pt in pts}
    assert values == {1, -1}


def test_conic_cover_drops_never_vanishing():
    pts = conic_cover_points([form2(1, 0, 1, 0, 0, 1)])
    assert pts == [(0, 0)]


def test_conic_cover_budget():
    forms = [form2(0, 0, 0, 0, 1, -i) for i in range(MAX_CONICS + 1)]
    with pytest.raises(BudgetExceededError):
        conic_cover_points(forms)


@given(
    st.lists(
        st.tuples(
            small_ints, small_ints, small_ints,
            small_ints, small_ints, small_ints,
        ),
        min_size=1,
        max_size=3,
    )
)
def test_conic_cover_is_strict_and_complete(raw):
    forms = [form2(*t) for t in raw]
    family = []
    for form in forms:
        conic = conic_from_form(form)
        if all(v == 0 for v in conic):
            continue
        for part in split_rational_lines(conic):
            if vanishes_somewhere(part) and part not in family:
                family.append(part)
    pts = conic_cover_points(forms)
    for c in family:
        for pt in pts:
            assert conic_value(c, pt) != 0
    if not family:
        return
    realized = {
        tuple(sign(conic_value(c, pt)) for c in family) for pt in pts
    }
    # Every strict sign vector seen on a coarse grid must be realized.
    grid = [Fraction(n, 2) for n in range(-7, 8)]
    for x in grid:
        for y in grid:
            vec = tuple(sign(conic_value(c, (x, y))) for c in family)
            if 0 in vec:
                continue
            assert vec in realized
