"""Exact integer matrices: Smith normal form, kernels, cokernels, unimodularity.

Everything here works with Python integers, so there is no overflow and no
floating point.  Matrices are immutable :class:`IntMatrix` values; the
algorithms copy into lists of lists internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatchError

__all__ = [
    "IntMatrix",
    "AbelianInvariants",
    "as_matrix",
    "smith_normal_form",
    "invariant_factors",
    "rank",
    "determinant",
    "cokernel_invariants",
    "kernel_basis",
    "hermite_normal_form",
    "is_unimodular",
    "unimodular_inverse",
    "block_diagonal",
]

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class IntMatrix:
    """A ``rows x cols`` integer matrix stored as a tuple of row tuples."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatchError(
                f"entry layout does not match declared shape {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("cannot infer column count of a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int) -> IntMatrix:
        columns = [tuple(int(x) for x in c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise DimensionMismatchError("columns must all have length %d" % rows)
        return cls(rows, len(columns), tuple(tuple(c[i] for c in columns) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    @property
    def T(self) -> IntMatrix:
        return self.transpose()

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries),
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(-x for x in r) for r in self.entries))

    def apply(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise DimensionMismatchError("vector length %d != %d columns" % (len(vector), self.cols))
        return tuple(sum(a * b for a, b in zip(r, vector)) for r in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def to_json(self) -> dict:
        """JSON form; entries outside the signed 64-bit range become decimal strings."""
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[x if abs(x) <= _INT64_MAX else str(x) for x in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in obj["entries"])
        return cls(int(obj["rows"]), int(obj["cols"]), data)

    def __str__(self) -> str:
        if not self.rows or not self.cols:
            return f"<{self.rows}x{self.cols} empty>"
        w = max(len(str(x)) for r in self.entries for x in r)
        return "\n".join("[" + " ".join(str(x).rjust(w) for x in r) + "]" for r in self.entries)


def as_matrix(a) -> IntMatrix:
    """Coerce nested sequences (or an IntMatrix, or a 2-d array) to :class:`IntMatrix`."""
    if isinstance(a, IntMatrix):
        return a
    if hasattr(a, "shape") and hasattr(a, "tolist"):
        r, c = a.shape
        return IntMatrix(r, c, tuple(tuple(int(x) for x in row) for row in a.tolist()))
    rows = [list(r) for r in a]
    if not rows:
        raise ValueError("cannot infer the shape of an empty nested sequence; use IntMatrix.zeros")
    return IntMatrix.from_rows(rows)


def block_diagonal(*blocks: IntMatrix) -> IntMatrix:
    n_rows = sum(b.rows for b in blocks)
    n_cols = sum(b.cols for b in blocks)
    out = [[0] * n_cols for _ in range(n_rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.entries):
            out[r0 + i][c0:c0 + b.cols] = row
        r0 += b.rows
        c0 += b.cols
    return IntMatrix(n_rows, n_cols, tuple(tuple(r) for r in out))


@dataclass(frozen=True)
class AbelianInvariants:
    """A finitely generated abelian group ``Z/d1 + ... + Z/dk + Z^free_rank``."""

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        if any(d < 2 for d in self.torsion):
            raise ValueError(f"torsion coefficients must be >= 2, got {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError(f"torsion coefficients must form a divisibility chain, got {self.torsion}")

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    @property
    def exponent(self) -> int | None:
        """Largest element order; ``None`` when the group has a free part (infinite)."""
        if self.free_rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    @classmethod
    def from_json(cls, obj: dict) -> AbelianInvariants:
        return cls(tuple(obj.get("torsion", ())), int(obj.get("free_rank", 0)))

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Smith normal form


def _snf(a: list[list[int]], m: int, n: int, track: bool):
    """In-place Smith reduction of ``a``; returns (U, V) as lists when tracking.

    Pivots on the nonzero entry of least absolute value.  Row operations are
    mirrored in U and column operations in V so that ``U @ A @ V == S``.
    """
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if track:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k, t):
        for r in range(t, m):
            row = a[r]
            row[j], row[k] = row[k], row[j]
        if track:
            for row in V:
                row[j], row[k] = row[k], row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        if track:
            U[i] = [-x for x in U[i]]

    t = 0
    while t < m and t < n:
        best = 0
        bi = bj = -1
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (not best or abs(v) < best):
                    best, bi, bj = abs(v), i, j
                    if best == 1:
                        break
            if best == 1:
                break
        if not best:
            break
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj, t)
        while True:
            if a[t][t] < 0:
                negate_row(t)
            p = a[t][t]
            half = p // 2
            clean = True
            prow = a[t]
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = (v + half) // p
                    if q:
                        row = a[i]
                        for c in range(t, n):
                            if prow[c]:
                                row[c] -= q * prow[c]
                        if track:
                            urow, uprow = U[i], U[t]
                            for c in range(m):
                                if uprow[c]:
                                    urow[c] -= q * uprow[c]
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                v = prow[j]
                if v:
                    q = (v + half) // p
                    if q:
                        for r in range(t, m):
                            x = a[r][t]
                            if x:
                                a[r][j] -= q * x
                        if track:
                            for row in V:
                                if row[t]:
                                    row[j] -= q * row[t]
                    if prow[j]:
                        clean = False
            if not clean:
                # a remainder smaller than the pivot appeared in row/column t
                best, bi, bj = abs(p), t, t
                for i in range(t + 1, m):
                    v = a[i][t]
                    if v and abs(v) < best:
                        best, bi, bj = abs(v), i, t
                for j in range(t + 1, n):
                    v = prow[j]
                    if v and abs(v) < best:
                        best, bi, bj = abs(v), t, j
                if bi != t:
                    swap_rows(t, bi)
                if bj != t:
                    swap_cols(t, bj, t)
                continue
            bad = -1
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            # fold the offending row into the pivot row, then reduce again
            prow = a[t]
            brow = a[bad]
            for c in range(t, n):
                prow[c] += brow[c]
            if track:
                U[t] = [x + y for x, y in zip(U[t], U[bad])]
        t += 1
    return U, V


def _lists(a) -> tuple[list[list[int]], int, int]:
    A = as_matrix(a)
    return [list(r) for r in A.entries], A.rows, A.cols


def smith_normal_form(a) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular ``U``, ``V`` and diagonal ``S`` with ``U @ A @ V == S``.

    The diagonal of ``S`` is nonnegative and satisfies ``d1 | d2 | ...``.

    >>> U, S, V = smith_normal_form([[2, 4], [6, 8]])
    >>> [S[0, 0], S[1, 1]]
    [2, 4]
    """
    work, m, n = _lists(a)
    U, V = _snf(work, m, n, track=True)
    S = IntMatrix(m, n, tuple(tuple(r) for r in work))
    return (IntMatrix(m, m, tuple(tuple(r) for r in U)), S, IntMatrix(n, n, tuple(tuple(r) for r in V)))


def invariant_factors(a) -> tuple[int, ...]:
    """Nonzero diagonal of the Smith normal form, including the unit factors."""
    work, m, n = _lists(a)
    _snf(work, m, n, track=False)
    out = []
    for i in range(min(m, n)):
        if not work[i][i]:
            break
        out.append(work[i][i])
    return tuple(out)


def rank(a) -> int:
    """Rank over the rationals (fraction-free elimination)."""
    work, m, n = _lists(a)
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r][c]
        for i in range(r + 1, m):
            x = work[i][c]
            if x:
                g = gcd(p, x)
                fp, fx = p // g, x // g
                work[i] = [fp * u - fx * v for u, v in zip(work[i], work[r])]
        r += 1
        if r == m:
            break
    return r


def determinant(a) -> int:
    """Determinant by Bareiss fraction-free elimination."""
    work, m, n = _lists(a)
    if m != n:
        raise DimensionMismatchError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if work[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            work[k], work[piv] = work[piv], work[k]
            sign = -sign
        pk = work[k][k]
        rk = work[k]
        for i in range(k + 1, n):
            ri = work[i]
            x = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - x * rk[j]) // prev
            ri[k] = 0
        prev = pk
    return sign * work[n - 1][n - 1]


def cokernel_invariants(a) -> AbelianInvariants:
    """Structure of ``Z^rows / column_span(A)``."""
    A = as_matrix(a)
    factors = invariant_factors(A)
    return AbelianInvariants(tuple(d for d in factors if d > 1), A.rows - len(factors))


def hermite_normal_form(a) -> IntMatrix:
    """Row-style Hermite normal form: echelon, positive pivots, entries above pivots reduced.

    Zero rows are dropped, so the result is a canonical basis of the row lattice.
    """
    work, m, n = _lists(a)
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if work[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(work[i][c]))
            work[r], work[i0] = work[i0], work[r]
            if work[r][c] < 0:
                work[r] = [-x for x in work[r]]
            p = work[r][c]
            done = True
            for i in range(r + 1, m):
                x = work[i][c]
                if x:
                    q = x // p
                    work[i] = [u - q * v for u, v in zip(work[i], work[r])]
                    if work[i][c]:
                        done = False
            if done:
                break
        if r < m and work[r][c]:
            p = work[r][c]
            for i in range(r):
                q = work[i][c] // p
                if q:
                    work[i] = [u - q * v for u, v in zip(work[i], work[r])]
            r += 1
            if r == m:
                break
    return IntMatrix(r, n, tuple(tuple(row) for row in work[:r]))


def kernel_basis(a) -> IntMatrix:
    """Columns form a saturated basis of ``{x in Z^cols : A x = 0}``.

    The basis is returned in a canonical (Hermite) form, so it is independent
    of the elimination path.

    >>> kernel_basis([[2, 4]]).column(0)
    (2, -1)
    """
    A = as_matrix(a)
    n = A.cols
    if A.rows == 0:
        return IntMatrix.identity(n)
    _, S, V = smith_normal_form(A)
    r = sum(1 for i in range(min(A.rows, n)) if S[i, i])
    cols = [V.column(j) for j in range(r, n)]
    if not cols:
        return IntMatrix.zeros(n, 0)
    H = hermite_normal_form(cols)
    return H.transpose()


def is_unimodular(vectors: Sequence[Sequence[int]]) -> bool:
    """True iff the vectors span a direct summand of rank ``len(vectors)``.

    Equivalently the gcd of the maximal minors of the matrix with these rows is 1.
    """
    vecs = [tuple(int(x) for x in v) for v in vectors]
    if not vecs:
        raise ValueError("is_unimodular needs at least one vector")
    n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise DimensionMismatchError("vectors have different lengths")
    k = len(vecs)
    if k > n:
        return False
    if k == 1:
        return gcd(*vecs[0]) == 1
    factors = invariant_factors(IntMatrix(k, n, tuple(vecs)))
    return len(factors) == k and factors[-1] == 1


def unimodular_inverse(a) -> IntMatrix:
    """Inverse of a square integer matrix with determinant +-1."""
    A = as_matrix(a)
    n = A.rows
    if A.cols != n:
        raise DimensionMismatchError("inverse of a non-square matrix")
    # Gauss-Jordan on [A | I] using only unimodular row operations
    work = [list(A.entries[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        while True:
            nz = [i for i in range(c, n) if work[i][c]]
            if not nz:
                raise ValueError("matrix is singular")
            i0 = min(nz, key=lambda i: abs(work[i][c]))
            work[c], work[i0] = work[i0], work[c]
            p = work[c][c]
            done = True
            for i in range(c + 1, n):
                x = work[i][c]
                if x:
                    q = x // p
                    work[i] = [u - q * v for u, v in zip(work[i], work[c])]
                    if work[i][c]:
                        done = False
            if done:
                break
        if abs(work[c][c]) != 1:
            raise ValueError("matrix is not unimodular")
        if work[c][c] < 0:
            work[c] = [-x for x in work[c]]
    for c in range(n - 1, -1, -1):
        for i in range(c):
            x = work[i][c]
            if x:
                work[i] = [u - x * v for u, v in zip(work[i], work[c])]
    return IntMatrix(n, n, tuple(tuple(r[n:]) for r in work))
