"""Homological stability ranges for the stabilisation ``W_{g-1,1} -> W_{g,1}`` as predicates.

Every verdict carries the clause that produced it, as an identifier plus
the literal inequalities, so generated tables document themselves.  All
comparisons use exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import FlavorMismatchError, OutOfRangeError, UnsupportedCoefficientsError
from .graded_algebra import GradedIndex

__all__ = [
    "COEFFICIENTS",
    "StabilityQuery",
    "RangeVerdict",
    "Clause",
    "theorem_a",
    "theorem_a_clause",
    "theorem_b_dichotomy",
    "grading_add",
    "rational_slope",
    "stability_table",
    "table_markdown",
    "table_json",
]

COEFFICIENTS = ("Z", "Z_half", "Q", "F2")
SPECIAL_DIMENSIONS = (3, 7)
Q1_TOKEN = "Q1(sigma_0)"


def rational_slope(n: int) -> Fraction:
    """The slope ``(3n-6)/(3n-5)`` of the rational ranges."""
    return Fraction(3 * n - 6, 3 * n - 5)


@dataclass(frozen=True)
class StabilityQuery:
    n: int
    coeffs: str
    g: int
    d: int

    def __post_init__(self):
        _check_n(self.n)
        if self.coeffs not in COEFFICIENTS:
            raise ValueError(f"coefficients must be one of {COEFFICIENTS}, got {self.coeffs!r}")
        if self.g < 1:
            raise ValueError("genus must be at least 1")
        if self.d < 0:
            raise ValueError("degree must be nonnegative")


def _check_n(n: int):
    if n < 3 or n % 2 == 0:
        raise OutOfRangeError(f"n must be odd and at least 3, got {n}")


@dataclass(frozen=True)
class Clause:
    """One clause: an identifier, readable inequalities, and the two predicates."""

    label: str
    kind: str
    n: int
    surjective_text: str
    isomorphism_text: str
    note: str = ""

    def citation(self) -> str:
        s = f"Theorem {self.label}: surjective for {self.surjective_text}, isomorphism for {self.isomorphism_text}"
        return s + (f" ({self.note})" if self.note else "")

    def surjective(self, g: int, d: int) -> bool:
        return _evaluate(self.kind, self.n, g, d)[0]

    def isomorphism(self, g: int, d: int) -> bool:
        return _evaluate(self.kind, self.n, g, d)[1]


def _evaluate(kind: str, n: int, g: int, d: int) -> tuple[bool, bool]:
    if kind == "i":
        return 3 * d <= 2 * g - 1, 3 * d <= 2 * g - 4
    if kind == "ii":
        return 2 * d <= g - 2, 2 * d <= g - 4
    if kind == "iii":
        return 3 * d <= 2 * g - 4, 3 * d <= 2 * g - 7
    s = rational_slope(n)
    if kind == "iv":
        return d < s * g, d < s * g - 1
    if kind == "v":
        return d < s * (g - 1), d < s * (g - 1) - 1
    if kind == "B.ii":
        return 3 * d <= 2 * g - 6, 3 * d <= 2 * g - 9
    raise KeyError(kind)


def theorem_a_clause(n: int, coeffs: str) -> Clause:
    """The clause of the stability theorem covering ``(n, coeffs)``."""
    _check_n(n)
    special = n in SPECIAL_DIMENSIONS
    if coeffs == "F2":
        raise UnsupportedCoefficientsError("no stability clause for F2 coefficients; see theorem_b_dichotomy")
    if coeffs == "Z":
        kind, surj, iso, note = ("i", "3d <= 2g-1", "3d <= 2g-4", "") if special else ("ii", "2d <= g-2", "2d <= g-4", "")
    elif coeffs == "Z_half":
        if special:
            # localisation is exact, so the integral range carries over
            kind, surj, iso, note = "i", "3d <= 2g-1", "3d <= 2g-4", "integral clause, base-changed to Z[1/2]"
        else:
            kind, surj, iso, note = "iii", "3d <= 2g-4", "3d <= 2g-7", ""
    elif coeffs == "Q":
        s = rational_slope(n)
        if special:
            kind, surj, iso, note = "iv", f"d < {s}*g", f"d < {s}*g - 1", ""
        else:
            kind, surj, iso, note = "v", f"d < {s}*(g-1)", f"d < {s}*(g-1) - 1", ""
    else:
        raise ValueError(f"unknown coefficients {coeffs!r}")
    return Clause(f"A({kind})", kind, n, surj, iso, note)


@dataclass(frozen=True)
class RangeVerdict:
    surjective: bool
    isomorphism: bool
    case_label: str
    citation: str

    def __post_init__(self):
        if self.isomorphism and not self.surjective:
            raise AssertionError("isomorphism outside the surjectivity region")

    def to_json(self) -> dict:
        return {
            "surjective": self.surjective,
            "isomorphism": self.isomorphism,
            "case_label": self.case_label,
            "citation": self.citation,
        }


def theorem_a(q: StabilityQuery) -> RangeVerdict:
    c = theorem_a_clause(q.n, q.coeffs)
    return RangeVerdict(c.surjective(q.g, q.d), c.isomorphism(q.g, q.d), c.label, c.citation())


@dataclass(frozen=True)
class Dichotomy:
    n: int
    clause_ii: Clause

    def branch_i_bidegree(self, k: int) -> tuple[int, int]:
        """Bidegree ``(g, d) = (4k, 2k)`` where branch (i) asserts nonzero relative homology."""
        if k < 1:
            raise ValueError("k must be at least 1")
        return (4 * k, 2 * k)

    def branch_i_flags(self, g: int, d: int) -> bool:
        return g % 4 == 0 and g > 0 and 2 * d == g

    def branch_ii(self, g: int, d: int) -> RangeVerdict:
        c = self.clause_ii
        return RangeVerdict(c.surjective(g, d), c.isomorphism(g, d), c.label, c.citation())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "branch_i": "relative integral homology nonzero in bidegrees (g, d) = (4k, 2k), k >= 1",
            "branch_ii": self.clause_ii.citation(),
        }


def theorem_b_dichotomy(n: int) -> Dichotomy:
    """The two alternatives of the quantised stability statement for ``n >= 5`` odd, ``n != 7``."""
    if n < 5 or n % 2 == 0 or n == 7:
        raise OutOfRangeError(f"the dichotomy needs n >= 5 odd with n != 7, got {n}")
    return Dichotomy(n, Clause("B(ii)", "B.ii", n, "3d <= 2g-6", "3d <= 2g-9"))


def grading_add(a: GradedIndex, b: GradedIndex) -> GradedIndex:
    """Monoid sum: genus adds, Arf adds mod 2, and genus 0 is the unit."""
    if a.flavor != b.flavor:
        raise FlavorMismatchError("cannot add an N-grading to an H-grading")
    if a.arf is None:
        return GradedIndex(a.genus + b.genus)
    if a.genus == 0:
        return b
    if b.genus == 0:
        return a
    return GradedIndex(a.genus + b.genus, (a.arf + b.arf) % 2)


# ------------------------------------------------------------------ tables

def _max_d(pred, g: int) -> int | None:
    """Largest ``d >= 0`` with ``pred(g, d)``; the regions are downward closed in ``d``."""
    if not pred(g, 0):
        return None
    d = 0
    while pred(g, d + 1):
        d += 1
    return d


def stability_table(n: int, coeffs: str, max_g: int) -> dict:
    c = theorem_a_clause(n, coeffs)
    rows = []
    for g in range(1, max_g + 1):
        rows.append({"g": g, "max_surjective_d": _max_d(c.surjective, g), "max_isomorphism_d": _max_d(c.isomorphism, g)})
    out = {"n": n, "coeffs": coeffs, "clause": c.label, "citation": c.citation(), "rows": rows}
    if n not in SPECIAL_DIMENSIONS and coeffs in ("Z", "Z_half"):
        out["arf_refinement"] = (
            f"in Arf-graded form the degree-1 map into grading (2,0) has cokernel Z/2 generated by {Q1_TOKEN}"
        )
    return out


def table_markdown(table: dict) -> str:
    lines = [
        f"# Stability ranges, n = {table['n']}, coefficients {table['coeffs']}",
        "",
        f"Clause: {table['citation']}",
        "",
        "| g | surjective for d <= | isomorphism for d <= |",
        "|---|---|---|",
    ]
    for r in table["rows"]:
        s = "none" if r["max_surjective_d"] is None else str(r["max_surjective_d"])
        i = "none" if r["max_isomorphism_d"] is None else str(r["max_isomorphism_d"])
        lines.append(f"| {r['g']} | {s} | {i} |")
    if "arf_refinement" in table:
        lines += ["", f"Note: {table['arf_refinement']}"]
    return "\n".join(lines) + "\n"


def table_json(table: dict) -> str:
    return json.dumps(table, indent=2, sort_keys=True) + "\n"

