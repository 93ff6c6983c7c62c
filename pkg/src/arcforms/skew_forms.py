"""Integral skew-symmetric forms: canonical forms, boundary groups, cuts, Arf.

A form is a Gram matrix ``G`` on ``Z^n`` with ``G^T = -G`` and zero
diagonal.  Its adjoint ``x -> G^T x`` maps ``M`` to ``M^dual``; the boundary
group is the cokernel of that map.  Every such form is congruent to exactly
one block sum ``H^g + T(d_1) + ... + T(d_r) + 0^b`` with ``T(d)`` the 2x2
form with off-diagonal entry ``d`` and ``d_1 | d_2 | ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._batched import batch_column_reduce, batch_unit_factor_count
from .errors import BoundaryTrivialError, DimensionMismatchError, NotUnimodularError, SkewFormError
from .exact_linear import (
    AbelianInvariants,
    IntMatrix,
    as_matrix,
    block_diagonal,
    cokernel_invariants,
    invariant_factors,
    is_unimodular,
    kernel_basis,
    smith_normal_form,
    unimodular_inverse,
)

__all__ = [
    "SkewForm",
    "CanonicalForm",
    "BoundaryElement",
    "BoundaryQuotient",
    "QuadraticRefinement",
    "canonical_decomposition",
    "canonical_basis",
    "genus",
    "r_invariant",
    "t_invariant",
    "boundary_group",
    "max_order_delta",
    "cut",
    "cut_genera_batch",
    "orthogonal_sum",
    "arf_invariant",
    "refinement_from_basis",
]


@dataclass(frozen=True)
class SkewForm:
    """Skew-symmetric bilinear form ``lambda(x, y) = x^T G y`` on ``Z^n``."""

    gram: IntMatrix

    def __post_init__(self):
        g = as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        if g.rows != g.cols:
            raise SkewFormError(f"Gram matrix must be square, got {g.rows}x{g.cols}")
        n = g.rows
        for i in range(n):
            if g[i, i]:
                raise SkewFormError(f"nonzero diagonal entry at ({i},{i})")
            for j in range(i + 1, n):
                if g[i, j] != -g[j, i]:
                    raise SkewFormError(f"entries ({i},{j}) and ({j},{i}) are not negatives")

    @classmethod
    def from_rows(cls, rows) -> SkewForm:
        rows = [list(r) for r in rows]
        return cls(IntMatrix.from_rows(rows, cols=None if rows else 0))

    @classmethod
    def hyperbolic(cls, g: int = 1) -> SkewForm:
        return CanonicalForm(g, (), 0).to_form()

    @classmethod
    def torsion(cls, d: int) -> SkewForm:
        return cls(IntMatrix.from_rows([[0, d], [-d, 0]]))

    @classmethod
    def zero(cls, n: int) -> SkewForm:
        return cls(IntMatrix.zeros(n, n))

    @property
    def rank(self) -> int:
        return self.gram.rows

    def __call__(self, x: Sequence[int], y: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(x, self.gram.apply(y)))

    def adjoint(self) -> IntMatrix:
        """Matrix of ``lambda^dual: M -> M^dual``; its image is the column span of G."""
        return self.gram.T

    def congruent(self, P) -> SkewForm:
        """The form ``P^T G P``."""
        P = as_matrix(P)
        return SkewForm(P.T @ self.gram @ P)

    def to_json(self) -> dict:
        return {"gram": self.gram.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> SkewForm:
        g = obj["gram"]
        if isinstance(g, dict):
            return cls(IntMatrix.from_json(g))
        return cls.from_rows(g)

    def __add__(self, other: SkewForm) -> SkewForm:
        return orthogonal_sum(self, other)


@dataclass(frozen=True)
class CanonicalForm:
    """``H^genus + T(d_1) + ... + T(d_r) + 0^zero_rank``."""

    genus: int
    torsion_pairs: tuple[int, ...]
    zero_rank: int

    def __post_init__(self):
        object.__setattr__(self, "torsion_pairs", tuple(int(d) for d in self.torsion_pairs))
        if self.genus < 0 or self.zero_rank < 0:
            raise ValueError("genus and zero rank must be nonnegative")
        if any(d < 2 for d in self.torsion_pairs):
            raise ValueError("torsion pairs must be >= 2")
        if any(b % a for a, b in zip(self.torsion_pairs, self.torsion_pairs[1:])):
            raise ValueError("torsion pairs must form a divisibility chain")

    @property
    def r(self) -> int:
        return len(self.torsion_pairs)

    @property
    def rank(self) -> int:
        return 2 * self.genus + 2 * self.r + self.zero_rank

    def to_form(self) -> SkewForm:
        blocks = [IntMatrix.from_rows([[0, 1], [-1, 0]])] * self.genus
        blocks += [IntMatrix.from_rows([[0, d], [-d, 0]]) for d in self.torsion_pairs]
        blocks += [IntMatrix.zeros(self.zero_rank, self.zero_rank)]
        return SkewForm(block_diagonal(*blocks))

    def to_json(self) -> dict:
        return {"genus": self.genus, "torsion_pairs": list(self.torsion_pairs), "zero_rank": self.zero_rank}

    @classmethod
    def from_json(cls, obj: dict) -> CanonicalForm:
        return cls(int(obj["genus"]), tuple(obj.get("torsion_pairs", ())), int(obj.get("zero_rank", 0)))

    def table(self) -> str:
        rows = [
            ("rank", str(self.rank)),
            ("genus", str(self.genus)),
            ("torsion pairs", ", ".join(map(str, self.torsion_pairs)) or "-"),
            ("zero rank", str(self.zero_rank)),
            ("t", str(2 * self.genus)),
        ]
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


def canonical_decomposition(f: SkewForm) -> CanonicalForm:
    """Canonical form read off from the paired Smith invariant factors of the Gram matrix."""
    factors = invariant_factors(f.gram)
    if len(factors) % 2:
        raise SkewFormError("odd rank for a skew form; input is not skew")
    pairs = []
    for a, b in zip(factors[::2], factors[1::2]):
        if a != b:
            raise SkewFormError(f"invariant factors {a}, {b} do not pair up")
        pairs.append(a)
    g = sum(1 for d in pairs if d == 1)
    return CanonicalForm(g, tuple(d for d in pairs if d > 1), f.rank - len(factors))


def boundary_group(f: SkewForm) -> AbelianInvariants:
    return cokernel_invariants(f.gram)


def genus(f: SkewForm) -> int:
    c = canonical_decomposition(f)
    bd = boundary_group(f)
    # torsion of the boundary comes in equal pairs, one pair per T(d) block
    r = len(bd.torsion) // 2
    twice = f.rank - bd.free_rank - 2 * r
    if twice != 2 * c.genus or r != c.r:
        raise ArithmeticError("genus from the boundary group disagrees with the canonical form")
    return c.genus


def r_invariant(f: SkewForm) -> int:
    return canonical_decomposition(f).r


def t_invariant(f: SkewForm) -> int:
    return 2 * genus(f)


def orthogonal_sum(*forms: SkewForm) -> SkewForm:
    return SkewForm(block_diagonal(*(f.gram for f in forms)))


def canonical_basis(f: SkewForm) -> tuple[IntMatrix, CanonicalForm]:
    """Symplectic-style reduction returning ``P`` with ``P^T G P`` in canonical form.

    Works by congruence moves only: swaps, sign changes and ``e_j += c e_i``,
    always pivoting on a smallest nonzero entry.  Independent of the Smith
    normal form path, and checked against it.
    """
    n = f.rank
    G = f.gram.to_lists()
    P = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap(i, j):
        if i == j:
            return
        G[i], G[j] = G[j], G[i]
        for row in G:
            row[i], row[j] = row[j], row[i]
        for row in P:
            row[i], row[j] = row[j], row[i]

    def negate(i):
        G[i] = [-x for x in G[i]]
        for row in G:
            row[i] = -row[i]
        for row in P:
            row[i] = -row[i]

    def add(j, i, c):
        # e_j <- e_j + c e_i
        if not c:
            return
        G[j] = [a + c * b for a, b in zip(G[j], G[i])]
        for row in G:
            row[j] += c * row[i]
        for row in P:
            row[j] += c * row[i]

    t = 0
    blocks = []
    while t + 1 < n:
        best = None
        for i in range(t, n):
            for j in range(i + 1, n):
                x = G[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap(t, i)
        if j == t:
            j = i
        swap(t + 1, j)
        if G[t][t + 1] < 0:
            negate(t + 1)
        d = G[t][t + 1]
        clean = True
        for k in range(t + 2, n):
            add(k, t + 1, -round_div(G[t][k], d))
            add(k, t, round_div(G[t + 1][k], d))
            if G[t][k] or G[t + 1][k]:
                clean = False
        if not clean:
            continue
        bad = next(((i, j) for i in range(t + 2, n) for j in range(i + 1, n) if G[i][j] % d), None)
        if bad is not None:
            add(t, bad[0], 1)
            continue
        blocks.append(d)
        t += 2
    canon = CanonicalForm(sum(1 for d in blocks if d == 1), tuple(d for d in blocks if d > 1), n - 2 * len(blocks))
    Pm = IntMatrix.from_rows(P, cols=n) if n else IntMatrix.zeros(0, 0)
    if f.congruent(Pm).gram != canon.to_form().gram:
        raise ArithmeticError("skew reduction did not reach a canonical Gram matrix")
    if canon != canonical_decomposition(f):
        raise ArithmeticError("skew reduction and Smith pairing disagree")
    return Pm, canon


def round_div(a: int, b: int) -> int:
    """Nearest integer to a/b (b > 0)."""
    return (2 * a + b) // (2 * b)


# ---------------------------------------------------------------- boundary

@dataclass(frozen=True)
class BoundaryElement:
    """An element of ``coker(lambda^dual)`` stored by its normal-form representative."""

    representative: tuple[int, ...]
    ambient: AbelianInvariants
    order: float | int

    def to_json(self) -> dict:
        return {
            "representative": list(self.representative),
            "ambient": self.ambient.to_json(),
            "order": "inf" if self.order == math.inf else self.order,
        }


class BoundaryQuotient:
    """The projection ``M^dual -> boundary`` in Smith coordinates.

    With ``U G V = S`` the map ``x -> U x`` identifies the boundary with
    ``Z/s_0 + ... + Z/s_{k-1} + Z^(n-k)``; coordinates with ``s_i = 1``
    carry nothing.
    """

    def __init__(self, f: SkewForm):
        self.form = f
        n = f.rank
        U, S, _ = smith_normal_form(f.gram)
        self.U = U
        self.U_inv = unimodular_inverse(U) if n else U
        diag = [S[i, i] for i in range(min(S.rows, S.cols)) if S[i, i]]
        self.moduli = tuple(diag) + (0,) * (n - len(diag))
        self.group = boundary_group(f)

    @property
    def rank(self) -> int:
        return self.form.rank

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Reduced Smith coordinates: torsion entries in ``[0, s)``, unit entries 0, free kept."""
        if len(x) != self.rank:
            raise DimensionMismatchError("vector length does not match the form")
        y = self.U.apply(x)
        return tuple(v % s if s else v for v, s in zip(y, self.moduli))

    def coordinates_batch(self, X: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`coordinates` for an integer array ``(b, n)``."""
        X = np.asarray(X)
        U = np.array(self.U.to_lists(), dtype=object)
        Y = (X.astype(object) @ U.T) if X.size else np.zeros((X.shape[0], self.rank), dtype=object)
        for i, s in enumerate(self.moduli):
            if s:
                Y[:, i] = Y[:, i] % s
        return Y

    def normal_form(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.U_inv.apply(self.coordinates(x))

    def order(self, x: Sequence[int]):
        return self._order(self.coordinates(x))

    def _order(self, y) -> float | int:
        o = 1
        for v, s in zip(y, self.moduli):
            if s == 0 and v:
                return math.inf
            if s > 1:
                o = math.lcm(o, s // math.gcd(v, s))
        return o

    def element(self, x: Sequence[int]) -> BoundaryElement:
        y = self.coordinates(x)
        return BoundaryElement(self.U_inv.apply(y), self.group, self._order(y))

    def same_class(self, x, y) -> bool:
        return self.coordinates(x) == self.coordinates(y)

    def generates_max_order_summand(self, x: Sequence[int]) -> bool:
        """Whether the class of ``x`` generates a cyclic summand of maximal order."""
        return self._max_order_summand(self.coordinates(x))

    def _max_order_summand(self, y) -> bool:
        free = [v for v, s in zip(y, self.moduli) if s == 0]
        if self.group.free_rank:
            # infinite order: a summand iff the free part is primitive
            return math.gcd(*free) == 1
        if self.group.is_trivial:
            return False
        # finite group: order equal to the exponent forces a cyclic summand
        return self._order(y) == self.group.exponent

    def max_order_candidates(self) -> list[tuple[int, ...]]:
        """Representatives of the Smith-coordinate generators of maximal order."""
        out = []
        top = [i for i, s in enumerate(self.moduli) if s == 0] if self.group.free_rank else [
            i for i, s in enumerate(self.moduli) if s > 1 and s == self.group.exponent
        ]
        for i in top:
            e = [0] * self.rank
            e[i] = 1
            out.append(self.U_inv.apply(e))
        return out


def max_order_delta(f: SkewForm) -> BoundaryElement:
    """A generator of a cyclic summand of maximal order (infinite beats finite).

    Among the Smith-coordinate generators of that order the lexicographically
    smallest normal-form representative is returned; the choice is arbitrary
    but deterministic.
    """
    q = BoundaryQuotient(f)
    if q.group.is_trivial:
        raise BoundaryTrivialError("the boundary group is zero")
    reps = sorted(q.max_order_candidates())
    return q.element(reps[0])


# ---------------------------------------------------------------- cuts

def cut(f: SkewForm, alphas: Sequence[Sequence[int]]) -> SkewForm:
    """Restriction of the form to a basis of the common kernel of ``alphas``."""
    alphas = [tuple(int(v) for v in a) for a in alphas]
    if not alphas:
        return f
    if any(len(a) != f.rank for a in alphas):
        raise DimensionMismatchError("functional length does not match the form")
    if not is_unimodular(alphas):
        raise NotUnimodularError("functionals are not unimodular")
    K = kernel_basis(IntMatrix.from_rows(alphas, cols=f.rank))
    if K.cols != f.rank - len(alphas):
        raise ArithmeticError("kernel has unexpected rank")
    if K.cols == 0:
        return SkewForm.zero(0)
    return f.congruent(K)


def cut_genera_batch(f: SkewForm, alpha_stack) -> tuple[np.ndarray, np.ndarray]:
    """Genera of cuts for a stack ``(b, k, n)`` of functional sets.

    Returns ``(genera, unimodular)``; genera are only meaningful where the
    set is unimodular (elsewhere -1).
    """
    A = np.asarray(alpha_stack)
    b, k, n = A.shape
    if n != f.rank:
        raise DimensionMismatchError("functional length does not match the form")
    diag, U, full = batch_column_reduce(A)
    uni = full & (diag == 1).all(axis=1) if k else np.ones(b, dtype=bool)
    K = U[:, :, k:]
    G = np.array(f.gram.to_lists(), dtype=K.dtype)
    sub = np.swapaxes(K, 1, 2) @ G @ K
    units = batch_unit_factor_count(sub)
    genera = np.where(uni, units // 2, -1)
    return genera, uni


# ---------------------------------------------------------------- quadratic refinements

@dataclass(frozen=True)
class QuadraticRefinement:
    """Values mod 2 of a quadratic refinement on the basis ``e_0, f_0, e_1, f_1, ...``."""

    base: SkewForm
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) % 2 for v in self.values))
        c = canonical_decomposition(self.base)
        if c.r or c.zero_rank or self.base.gram != c.to_form().gram:
            raise SkewFormError("refinements are only defined on a hyperbolic canonical basis")
        if len(self.values) != self.base.rank:
            raise DimensionMismatchError("need one value per basis vector")

    @classmethod
    def hyperbolic(cls, values: Sequence[int]) -> QuadraticRefinement:
        return cls(SkewForm.hyperbolic(len(values) // 2), tuple(values))

    @property
    def genus(self) -> int:
        return self.base.rank // 2

    def __call__(self, x: Sequence[int]) -> int:
        return (sum(a * v for a, v in zip(x, self.values)) + sum(x[2 * i] * x[2 * i + 1] for i in range(self.genus))) % 2

    def to_json(self) -> dict:
        return {"gram": self.base.gram.to_json(), "qvals": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> QuadraticRefinement:
        base = SkewForm.from_json(obj)
        q = obj["qvals"]
        if base.gram == CanonicalForm(base.rank // 2, (), 0).to_form().gram:
            return cls(base, tuple(q))
        return refinement_from_basis(base, q)


def arf_invariant(q: QuadraticRefinement) -> int:
    return sum(q.values[2 * i] * q.values[2 * i + 1] for i in range(q.genus)) % 2


def refinement_from_basis(f: SkewForm, values: Sequence[int]) -> QuadraticRefinement:
    """Transport a refinement given on the standard basis of a unimodular form to a hyperbolic basis."""
    if len(values) != f.rank:
        raise DimensionMismatchError("need one value per basis vector")
    P, canon = canonical_basis(f)
    if canon.r or canon.zero_rank:
        raise SkewFormError("refinement needs a unimodular form")
    G = f.gram
    new = []
    for j in range(f.rank):
        c = P.column(j)
        v = sum(ci * qi for ci, qi in zip(c, values))
        v += sum(c[a] * c[b] * G[a, b] for a in range(f.rank) for b in range(a + 1, f.rank))
        new.append(v % 2)
    return QuadraticRefinement(canon.to_form(), tuple(new))

