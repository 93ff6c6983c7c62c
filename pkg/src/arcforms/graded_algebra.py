"""Bigraded Hilbert series of free graded-commutative algebras and small CDGAs over Q.

Bidegrees are pairs ``(g, d)``: ``g`` is the grading (genus) and ``d`` the
homological degree.  A generator is polynomial when even and exterior when
odd; parity defaults to ``d mod 2`` but can be set explicitly.  Moving a
symbol of parity ``a`` past one of parity ``b`` costs ``(-1)^(ab)``.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InjectivityError, OutOfRangeError, TruncationOverflowError
from .exact_linear import IntMatrix, rank

__all__ = [
    "GradedIndex",
    "Generator",
    "BigradedSeries",
    "Polynomial",
    "FreeCdgaPresentation",
    "free_gca_series",
    "quotient_by_slope_zero_generator",
    "multiply_by_polynomial_generator",
    "cdga_homology",
    "chain_dimensions",
    "vanishing_line_check",
    "parse_polynomial",
    "step0_single_generator",
    "step0_two_generators",
    "DEFAULT_MONOMIAL_CAP",
]

DEFAULT_MONOMIAL_CAP = 200_000


@dataclass(frozen=True)
class GradedIndex:
    """An element of ``N`` (``arf=None``) or of ``{0} u N_{>0} x Z/2`` (``arf`` set)."""

    genus: int
    arf: int | None = None

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus grading must be nonnegative")
        if self.arf is not None:
            a = int(self.arf) % 2
            # (0, 1) and (0, 0) are the same element: the monoid unit
            object.__setattr__(self, "arf", 0 if self.genus == 0 else a)

    @property
    def flavor(self) -> str:
        return "N" if self.arf is None else "H"

    @property
    def rank(self) -> int:
        return self.genus

    def __str__(self) -> str:
        if self.arf is None or self.genus == 0:
            return str(self.genus)
        return f"({self.genus},{self.arf})"


@dataclass(frozen=True)
class Generator:
    name: str
    g: int
    d: int
    parity: int | None = None

    def __post_init__(self):
        if self.g < 0 or self.d < 0:
            raise ValueError("generator bidegree must be nonnegative")
        if not re.fullmatch(r"[A-Za-z_\[][A-Za-z0-9_\[\],]*", self.name):
            raise ValueError(f"invalid generator name {self.name!r}")

    @property
    def odd(self) -> bool:
        p = self.d % 2 if self.parity is None else self.parity % 2
        return bool(p)

    def to_json(self) -> dict:
        out = {"name": self.name, "g": self.g, "d": self.d}
        if self.parity is not None:
            out["parity"] = self.parity % 2
        return out

    @classmethod
    def from_json(cls, obj) -> Generator:
        if isinstance(obj, (list, tuple)):
            return cls(obj[0], int(obj[1]), int(obj[2]), None if len(obj) < 4 else obj[3])
        return cls(obj["name"], int(obj["g"]), int(obj["d"]), obj.get("parity"))


@dataclass(frozen=True)
class BigradedSeries:
    """Dimensions in bidegrees ``0 <= g <= G``, ``0 <= d <= D``; absent entries are zero."""

    G: int
    D: int
    dims: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (g, d), v in dict(self.dims).items():
            v = Fraction(v)
            if not (0 <= g <= self.G and 0 <= d <= self.D):
                raise OutOfRangeError(f"bidegree {(g, d)} outside the window {(self.G, self.D)}")
            if v:
                clean[(int(g), int(d))] = v
        object.__setattr__(self, "dims", clean)

    def __getitem__(self, gd) -> Fraction:
        g, d = gd
        if not (0 <= g <= self.G and 0 <= d <= self.D):
            raise OutOfRangeError(f"bidegree {(g, d)} outside the window {(self.G, self.D)}")
        return self.dims.get((g, d), Fraction(0))

    def support(self) -> list[tuple[int, int]]:
        return sorted(self.dims)

    def restrict(self, G: int, D: int) -> BigradedSeries:
        return BigradedSeries(G, D, {k: v for k, v in self.dims.items() if k[0] <= G and k[1] <= D})

    def euler(self, g: int) -> Fraction:
        return sum(((-1) ** d * self[g, d] for d in range(self.D + 1)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "G": self.G,
            "D": self.D,
            "entries": [[g, d, _frac_json(v)] for (g, d), v in sorted(self.dims.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> BigradedSeries:
        return cls(int(obj["G"]), int(obj["D"]), {(int(g), int(d)): Fraction(str(v)) for g, d, v in obj["entries"]})

    def table(self) -> str:
        """Rows are degrees d (top to bottom increasing), columns gradings g."""
        cells = [[str(self[g, d]) if self[g, d] else "." for g in range(self.G + 1)] for d in range(self.D + 1)]
        w = max([len(c) for row in cells for c in row] + [len(str(self.G))])
        head = "d\\g " + " ".join(str(g).rjust(w) for g in range(self.G + 1))
        lines = [head] + [f"{d:>3} " + " ".join(c.rjust(w) for c in row) for d, row in enumerate(cells)]
        return "\n".join(lines)


def _frac_json(v: Fraction):
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def free_gca_series(gens: Sequence[Generator], G: int, D: int) -> BigradedSeries:
    """Hilbert series of the free graded-commutative algebra on ``gens``, truncated at ``(G, D)``."""
    for x in gens:
        if x.g < 1:
            raise ValueError(f"generator {x.name} has grading 0; dimensions would be infinite")
    cur = defaultdict(int)
    cur[(0, 0)] = 1
    for x in gens:
        nxt = defaultdict(int)
        if x.odd:
            for (g, d), v in cur.items():
                nxt[(g, d)] += v
                if g + x.g <= G and d + x.d <= D:
                    nxt[(g + x.g, d + x.d)] += v
        else:
            # multiply by 1/(1 - t), processing bidegrees in increasing order
            for g in range(G + 1):
                for d in range(D + 1):
                    v = cur.get((g, d), 0)
                    if g >= x.g and d >= x.d:
                        v += nxt.get((g - x.g, d - x.d), 0)
                    if v:
                        nxt[(g, d)] = v
        cur = nxt
    return BigradedSeries(G, D, dict(cur))


def quotient_by_slope_zero_generator(series: BigradedSeries, generator: Generator) -> BigradedSeries:
    """Series of the cokernel of multiplication by a degree-0 generator, assuming it is injective."""
    if generator.d != 0 or generator.g < 1 or generator.odd:
        raise ValueError("need an even generator in bidegree (g, 0) with g >= 1")
    s = generator.g
    out = {}
    for g in range(series.G + 1):
        for d in range(series.D + 1):
            v = series[g, d] - (series[g - s, d] if g >= s else 0)
            if v < 0:
                raise InjectivityError(
                    f"negative dimension {v} at {(g, d)}: multiplication by {generator.name} is not injective"
                )
            if v:
                out[(g, d)] = v
    return BigradedSeries(series.G, series.D, out)


def multiply_by_polynomial_generator(series: BigradedSeries, generator: Generator) -> BigradedSeries:
    """Series of ``series (x) Q[generator]``; inverse of the quotient above."""
    if generator.odd or generator.g < 1:
        raise ValueError("need an even generator with positive grading")
    out = {}
    for g in range(series.G + 1):
        for d in range(series.D + 1):
            v = series[g, d]
            if g >= generator.g and d >= generator.d:
                v += out.get((g - generator.g, d - generator.d), 0)
            if v:
                out[(g, d)] = v
    return BigradedSeries(series.G, series.D, out)


# ------------------------------------------------------------------ polynomials

Monomial = tuple  # exponent vector in generator order


class Polynomial:
    """Element of a free graded-commutative algebra: monomial exponent vectors to rationals."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: Sequence[Generator], terms: Mapping | None = None):
        self.gens = tuple(gens)
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def generator(cls, gens, i: int) -> Polynomial:
        m = [0] * len(gens)
        m[i] = 1
        return cls(gens, {tuple(m): 1})

    @classmethod
    def one(cls, gens) -> Polynomial:
        return cls(gens, {(0,) * len(gens): 1})

    def __add__(self, other: Polynomial) -> Polynomial:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.gens, out)

    def scale(self, c) -> Polynomial:
        return Polynomial(self.gens, {m: c * v for m, v in self.terms.items()})

    def __neg__(self) -> Polynomial:
        return self.scale(-1)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        out: dict = defaultdict(Fraction)
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                sgn, m = _mono_mul(self.gens, a, b)
                if sgn:
                    out[m] += sgn * ca * cb
        return Polynomial(self.gens, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def bidegrees(self) -> set:
        return {_bideg(self.gens, m) for m in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                x.name if e == 1 else f"{x.name}^{e}" for x, e in zip(self.gens, m) if e
            )
            coef = "" if (abs(c) == 1 and mono) else str(abs(c))
            body = "*".join(p for p in (coef, mono) if p) or "1"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]


def _bideg(gens, m) -> tuple[int, int]:
    return (sum(e * x.g for e, x in zip(m, gens)), sum(e * x.d for e, x in zip(m, gens)))


def _mono_mul(gens, a, b) -> tuple[int, tuple]:
    """``(sign, monomial)`` of ``a * b`` in normal order; sign 0 if an exterior square appears."""
    sign = 1
    odd_after = 0  # odd symbols of a with index > current, scanned right to left
    for i in range(len(gens) - 1, -1, -1):
        if gens[i].odd:
            if a[i] and b[i]:
                return 0, ()
            if b[i] and odd_after % 2:
                sign = -sign
            odd_after += a[i]
    return sign, tuple(x + y for x, y in zip(a, b))


_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_polynomial(text: str, gens: Sequence[Generator]) -> Polynomial:
    """Parse sums of products like ``"s1^2 - 2*s0*s1"``; factors are multiplied left to right."""
    gens = tuple(gens)
    index = {x.name: i for i, x in enumerate(gens)}
    text = text.strip()
    if text in ("", "0"):
        return Polynomial(gens)
    total = Polynomial(gens)
    for sign, body in _TERM.findall(text):
        term = Polynomial.one(gens)
        for factor in body.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            base, _, exp = factor.partition("^")
            base = base.strip()
            e = int(exp) if exp else 1
            if e < 0:
                raise ValueError("negative exponents are not allowed")
            if base in index:
                piece = Polynomial.one(gens)
                for _ in range(e):
                    piece = piece * Polynomial.generator(gens, index[base])
            else:
                try:
                    piece = Polynomial.one(gens).scale(Fraction(base) ** e)
                except ValueError:
                    raise ValueError(f"unknown symbol {base!r} in {text!r}") from None
            term = term * piece
        total = total + (term.scale(-1) if sign == "-" else term)
    return total


# ------------------------------------------------------------------ CDGAs

@dataclass
class FreeCdgaPresentation:
    generators: tuple
    differential: dict  # generator name -> Polynomial (missing means 0)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        names = [x.name for x in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        diff = {}
        for name, p in dict(self.differential).items():
            if name not in names:
                raise ValueError(f"differential given for unknown generator {name!r}")
            if isinstance(p, str):
                p = parse_polynomial(p, self.generators)
            x = self.generators[names.index(name)]
            want = (x.g, x.d - 1)
            for bd in p.bidegrees():
                if bd != want:
                    raise ValueError(f"d({name}) has a term in bidegree {bd}, expected {want}")
            diff[name] = p
        self.differential = diff

    def d_generator(self, i: int) -> Polynomial:
        return self.differential.get(self.generators[i].name, Polynomial(self.generators))

    def d(self, m: Monomial) -> Polynomial:
        """Leibniz rule on the word ``x_1^e_1 x_2^e_2 ...`` read left to right."""
        gens = self.generators
        word = [i for i, e in enumerate(m) for _ in range(e)]
        total = Polynomial(gens)
        prefix = Polynomial.one(gens)
        sign = 1
        for pos, i in enumerate(word):
            rest = [0] * len(gens)
            for j in word[pos + 1:]:
                rest[j] += 1
            suffix = Polynomial(gens, {tuple(rest): 1})
            dx = self.d_generator(i)
            if not dx.is_zero():
                total = total + (prefix * dx * suffix).scale(sign)
            prefix = prefix * Polynomial.generator(gens, i)
            if gens[i].odd:
                sign = -sign
        return total

    def to_json(self) -> dict:
        return {
            "generators": [x.to_json() for x in self.generators],
            "differential": {k: str(v) for k, v in self.differential.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> FreeCdgaPresentation:
        gens = tuple(Generator.from_json(x) for x in obj["generators"])
        return cls(gens, {k: parse_polynomial(v, gens) for k, v in obj.get("differential", {}).items()})


def _monomials(gens: Sequence[Generator], G: int, D: int, cap: int) -> dict:
    """Monomials per bidegree inside the window."""
    out: dict = defaultdict(list)
    count = 0

    def rec(i, g, d, exps):
        nonlocal count
        if i == len(gens):
            out[(g, d)].append(tuple(exps))
            count += 1
            if count > cap:
                raise TruncationOverflowError(f"more than {cap} monomials in the window {(G, D)}")
            return
        x = gens[i]
        top = 1 if x.odd else G
        e = 0
        while e <= top and g + e * x.g <= G and d + e * x.d <= D:
            exps.append(e)
            rec(i + 1, g + e * x.g, d + e * x.d, exps)
            exps.pop()
            e += 1

    for x in gens:
        if x.g < 1:
            raise ValueError(f"generator {x.name} has grading 0; the window would be infinite")
    rec(0, 0, 0, [])
    for k in out:
        out[k].sort()
    return out


def chain_dimensions(pres: FreeCdgaPresentation, G: int, D: int) -> BigradedSeries:
    return free_gca_series(pres.generators, G, D)


def _rank_rational(rows: list[list[Fraction]]) -> int:
    if not rows or not rows[0]:
        return 0
    scaled = []
    for r in rows:
        den = 1
        for v in r:
            den = den * v.denominator // math.gcd(den, v.denominator)
        scaled.append([int(v * den) for v in r])
    return rank(IntMatrix.from_rows(scaled, cols=len(scaled[0])))


def cdga_homology(pres: FreeCdgaPresentation, G: int, D: int, monomial_cap: int = DEFAULT_MONOMIAL_CAP) -> BigradedSeries:
    """Homology dimensions in the window, from exact ranks of the differential per bidegree."""
    basis = _monomials(pres.generators, G, D + 1, monomial_cap)
    ranks = {}
    mats = {}
    for g in range(G + 1):
        for d in range(1, D + 2):
            src = basis.get((g, d), [])
            tgt = basis.get((g, d - 1), [])
            if not src or not tgt:
                ranks[(g, d)] = 0
                continue
            pos = {m: i for i, m in enumerate(tgt)}
            mat = [[Fraction(0)] * len(src) for _ in tgt]
            for j, m in enumerate(src):
                for mm, c in pres.d(m).terms.items():
                    mat[pos[mm]][j] += c
            mats[(g, d)] = mat
            ranks[(g, d)] = _rank_rational(mat)
    for g in range(G + 1):
        for d in range(2, D + 2):
            a, b = mats.get((g, d - 1)), mats.get((g, d))
            if a is None or b is None:
                continue
            for i in range(len(a)):
                for j in range(len(b[0])):
                    if sum(a[i][k] * b[k][j] for k in range(len(b))):
                        raise ArithmeticError(f"d^2 != 0 in bidegree {(g, d)}")
    out = {}
    for g in range(G + 1):
        for d in range(D + 1):
            v = len(basis.get((g, d), [])) - ranks.get((g, d), 0) - ranks.get((g, d + 1), 0)
            if v < 0:
                raise ArithmeticError("negative homology dimension")
            if v:
                out[(g, d)] = v
    return BigradedSeries(G, D, out)


def vanishing_line_check(series: BigradedSeries, slope, intercept) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``series(g, d) = 0`` whenever ``d < slope*g + intercept``; else the first offending bidegree."""
    slope, intercept = Fraction(slope), Fraction(intercept)
    for g in range(series.G + 1):
        for d in range(series.D + 1):
            if d < slope * g + intercept and series[g, d]:
                return False, (g, d)
    return True, None


# ------------------------------------------------------------------ the two universal examples

def step0_single_generator(k: int, G: int) -> dict:
    """``Lambda(s0, [s0,s0])`` with ``s0`` in (1,0) and the bracket in (2, k-1), and its quotient by ``s0``."""
    if k < 2:
        raise ValueError("need k >= 2")
    s0 = Generator("s0", 1, 0)
    br = Generator("[s0,s0]", 2, k - 1, parity=1)
    D = k - 1
    full = free_gca_series([s0, br], G, D)
    quot = quotient_by_slope_zero_generator(full, s0)
    ok, witness = vanishing_line_check(quot, 1, 0)
    on_line = all(Fraction(d) == Fraction(k - 1, 2) * g for g, d in quot.support())
    return {
        "generators": [s0, br],
        "series": full,
        "quotient": quot,
        "on_slope_line": on_line,
        "vanishing_d_lt_g": (ok, witness),
    }


def step0_two_generators(G: int) -> dict:
    """``(Lambda(s1, rho), d rho = s1^2)``: its homology and the vanishing line ``d < g - 1``."""
    s1 = Generator("s1", 1, 0)
    rho = Generator("rho", 2, 1)
    pres = FreeCdgaPresentation((s1, rho), {"rho": "s1^2"})
    H = cdga_homology(pres, G, 1)
    ok, witness = vanishing_line_check(H, 1, -1)
    return {"presentation": pres, "homology": H, "vanishing_d_lt_g_minus_1": (ok, witness)}
