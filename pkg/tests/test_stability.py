from fractions import Fraction

import pytest

from oracles import closed_form_ranges

from arcforms.errors import FlavorMismatchError, OutOfRangeError, UnsupportedCoefficientsError
from arcforms.graded_algebra import GradedIndex
from arcforms.stability import (
    StabilityQuery,
    grading_add,
    rational_slope,
    stability_table,
    table_json,
    table_markdown,
    theorem_a,
    theorem_a_clause,
    theorem_b_dichotomy,
)

ODD = range(3, 100, 2)


def verdict(n, coeffs, g, d):
    v = theorem_a(StabilityQuery(n, coeffs, g, d))
    return v.surjective, v.isomorphism


def test_theorem_a_examples():
    assert verdict(3, "Z", 5, 3) == (True, False)
    assert verdict(5, "Z", 10, 4) == (True, False)
    assert verdict(3, "Q", 8, 5) == (True, False)
    assert theorem_a(StabilityQuery(3, "Z", 5, 3)).case_label == "A(i)"
    assert theorem_a(StabilityQuery(5, "Z", 10, 4)).case_label == "A(ii)"
    assert theorem_a(StabilityQuery(3, "Q", 8, 5)).case_label == "A(iv)"
    assert theorem_a(StabilityQuery(9, "Q", 8, 5)).case_label == "A(v)"


def test_z_half_special_dimensions_use_integral_clause():
    assert theorem_a_clause(3, "Z_half").kind == "i"
    assert theorem_a_clause(7, "Z_half").kind == "i"
    assert theorem_a_clause(5, "Z_half").kind == "iii"


def test_unsupported_and_invalid():
    with pytest.raises(UnsupportedCoefficientsError):
        theorem_a(StabilityQuery(3, "F2", 4, 1))
    for n in (1, 4, 6):
        with pytest.raises(OutOfRangeError):
            StabilityQuery(n, "Z", 4, 1)
    with pytest.raises(ValueError):
        StabilityQuery(3, "R", 4, 1)
    with pytest.raises(ValueError):
        StabilityQuery(3, "Z", 0, 1)


def test_dichotomy_examples():
    B = theorem_b_dichotomy(5)
    assert B.branch_i_bidegree(2) == (8, 4)
    assert B.branch_i_flags(8, 4) and not B.branch_i_flags(8, 3)
    v = B.branch_ii(9, 4)
    assert v.surjective and not v.isomorphism
    for n in (3, 7, 6):
        with pytest.raises(OutOfRangeError):
            theorem_b_dichotomy(n)


def test_predicates_match_closed_form():
    for n in (3, 5, 7, 9, 11):
        for coeffs in ("Z", "Z_half", "Q"):
            table = stability_table(n, coeffs, 40)
            for row in table["rows"]:
                want = closed_form_ranges(n, coeffs, row["g"])
                assert (row["max_surjective_d"], row["max_isomorphism_d"]) == want


def test_isomorphism_inside_surjectivity():
    for n in (3, 5, 7, 9):
        for coeffs in ("Z", "Z_half", "Q"):
            c = theorem_a_clause(n, coeffs)
            for g in range(1, 101):
                for d in range(101):
                    assert not c.isomorphism(g, d) or c.surjective(g, d)
    B = theorem_b_dichotomy(5).clause_ii
    assert all(not B.isomorphism(g, d) or B.surjective(g, d) for g in range(1, 101) for d in range(101))


def test_regions_monotone():
    for n in (3, 5, 7):
        for coeffs in ("Z", "Z_half", "Q"):
            c = theorem_a_clause(n, coeffs)
            for g in range(1, 40):
                for d in range(40):
                    if c.surjective(g, d + 1):
                        assert c.surjective(g, d)
                    if c.surjective(g, d):
                        assert c.surjective(g + 1, d)


def test_rational_slopes_increase_below_one():
    slopes = [rational_slope(n) for n in ODD]
    assert all(a < b for a, b in zip(slopes, slopes[1:]))
    assert all(s < 1 for s in slopes)
    assert rational_slope(3) == Fraction(3, 4)


def test_grading_add_examples():
    assert grading_add(GradedIndex(1, 0), GradedIndex(1, 1)) == GradedIndex(2, 1)
    assert grading_add(GradedIndex(1, 1), GradedIndex(1, 1)) == GradedIndex(2, 0)
    x = GradedIndex(3, 1)
    assert grading_add(GradedIndex(0, 0), x) == x
    assert grading_add(GradedIndex(2), GradedIndex(3)) == GradedIndex(5)
    with pytest.raises(FlavorMismatchError):
        grading_add(GradedIndex(1), GradedIndex(1, 0))


def test_grading_add_laws():
    elems = [GradedIndex(0, 0)] + [GradedIndex(g, a) for g in range(1, 11) for a in (0, 1)]
    zero = GradedIndex(0, 0)
    for a in elems:
        assert grading_add(a, zero) == a
        for b in elems:
            assert grading_add(a, b) == grading_add(b, a)
    small = [e for e in elems if e.genus <= 4]
    for a in small:
        for b in small:
            for c in small:
                assert grading_add(grading_add(a, b), c) == grading_add(a, grading_add(b, c))


def test_tables_render_deterministically():
    t = stability_table(5, "Z", 12)
    assert table_markdown(t) == table_markdown(stability_table(5, "Z", 12))
    assert table_json(t) == table_json(stability_table(5, "Z", 12))
    assert "Q1(sigma_0)" in t["arf_refinement"]
    assert "arf_refinement" not in stability_table(3, "Z", 4)
    assert "| 12 | 5 | 4 |" in table_markdown(t)


def test_citation_strings():
    v = theorem_a(StabilityQuery(5, "Q", 12, 7))
    assert v.citation.startswith("Theorem A(v)")
    assert "9/10" in v.citation
    assert v.to_json()["case_label"] == "A(v)"
