"""Independent reference implementations used only by the tests.

Nothing here imports from arcforms; each routine is the slow textbook version
of something the library does quickly.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd

import numpy as np


def det(rows):
    """Determinant by fraction-valued Gaussian elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for r in range(c + 1, n):
            m = a[r][c] / a[c][c]
            if m:
                a[r] = [x - m * y for x, y in zip(a[r], a[c])]
    return int(d)


def minor_gcd(vectors):
    """gcd of all maximal minors of the matrix whose rows are ``vectors``."""
    k = len(vectors)
    n = len(vectors[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, det([[v[c] for c in cols] for v in vectors]))
    return g


def is_unimodular(vectors):
    return minor_gcd(vectors) == 1


def naive_invariant_factors(rows):
    """Nonzero invariant factors of an integer matrix by plain pivoting elimination."""
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    done = False
                    break
            if not done:
                continue
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    for r in a:
                        r[t], r[j] = r[j], r[t]
                    done = False
                    break
            if not done:
                continue
            # divisibility: fold in any entry the pivot does not divide
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                done = False
        out.append(abs(a[t][t]))
        t += 1
    return out


def dense_invariant_factors(rows):
    """The same pivoting elimination on a dense int64 array, for matrices with thousands of rows.

    Falls back to the pure version if entries grow past an overflow-safe bound.
    """
    a = np.array(rows, dtype=np.int64)
    if a.size == 0:
        return []
    m, n = a.shape
    out = []
    t = 0
    limit = 2**31
    while t < min(m, n):
        sub = a[t:, t:]
        nz = np.argwhere(sub)
        if not len(nz):
            break
        vals = np.abs(sub[nz[:, 0], nz[:, 1]])
        i, j = nz[np.argmin(vals)] + t
        a[[t, i]] = a[[i, t]]
        a[:, [t, j]] = a[:, [j, t]]
        while True:
            p = a[t, t]
            q = a[t + 1:, t] // p
            hit = np.nonzero(q)[0]
            a[t + 1 + hit] -= np.outer(q[hit], a[t])
            col = np.nonzero(a[t + 1:, t])[0]
            if len(col):
                r = t + 1 + col[np.argmin(np.abs(a[t + 1 + col, t]))]
                a[[t, r]] = a[[r, t]]
                continue
            q = a[t, t + 1:] // p
            hit = np.nonzero(q)[0]
            a[:, t + 1 + hit] -= np.outer(a[:, t], q[hit])
            row = np.nonzero(a[t, t + 1:])[0]
            if len(row):
                c = t + 1 + row[np.argmin(np.abs(a[t, t + 1 + row]))]
                a[:, [t, c]] = a[:, [c, t]]
                continue
            if abs(p) != 1:
                bad = np.argwhere(a[t + 1:, t + 1:] % p)
                if len(bad):
                    a[t] += a[t + 1 + bad[0][0]]
                    continue
            break
        if np.abs(a).max() > limit:
            return naive_invariant_factors(rows)
        out.append(int(abs(a[t, t])))
        t += 1
    return out


def naive_reduced_homology(simplices, top):
    """Reduced integral homology ``{k: (betti, [torsion])}`` for ``k <= top``.

    ``simplices`` is any collection of vertex tuples closed under faces.
    """
    by_dim = {}
    for s in simplices:
        s = tuple(sorted(s))
        by_dim.setdefault(len(s) - 1, set()).add(s)
    faces = {k: sorted(v) for k, v in by_dim.items()}
    faces[-1] = [()] if faces else []

    def boundary(k):
        rows = faces.get(k - 1, [])
        cols = faces.get(k, [])
        index = {s: i for i, s in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                mat[index[s[:i] + s[i + 1:]]][j] += (-1) ** i
        return mat, len(rows), len(cols)

    out = {}
    for k in range(0, top + 1):
        dk, _, nk = boundary(k)
        dk1, _, _ = boundary(k + 1)
        rank_k = len(dense_invariant_factors(dk)) if dk and nk else 0
        inv = dense_invariant_factors(dk1) if dk1 and dk1[0] else []
        betti = nk - rank_k - len(inv)
        out[k] = (betti, sorted(x for x in inv if x > 1))
    return out


def connectivity_from(homology):
    """Largest c with reduced homology zero through c; ``-2`` for an empty complex."""
    c = -1
    for k in sorted(homology):
        b, tors = homology[k]
        if b or tors:
            return c
        c = k
    return c


def democratic_arf(gram, qvals):
    """Arf invariant as the majority value of q over all of ``(Z/2)^n``.

    ``q(x) = sum x_i q(b_i) + sum_{i<j} x_i x_j lambda(b_i, b_j)`` mod 2.
    """
    n = len(qvals)
    zeros = 0
    for x in product((0, 1), repeat=n):
        v = sum(a * b for a, b in zip(x, qvals))
        v += sum(x[i] * x[j] * gram[i][j] for i in range(n) for j in range(i + 1, n))
        zeros += v % 2 == 0
    return 0 if 2 * zeros > 2 ** n else 1


def join_connectivity_prediction(hx, hy, top):
    """Reduced homology of ``X * Y`` via the join Kunneth formula, as a connectivity.

    ``h~_{k+1}(X*Y) = sum_{i+j=k} h~_i X (x) h~_j Y + sum_{i+j=k-1} Tor(h~_i X, h~_j Y)``.
    Everything is tested only for vanishing, which needs just ranks and torsion.
    """

    def nonzero_tensor(a, b):
        (ba, ta), (bb, tb) = a, b
        return (ba and bb) or (ba and tb) or (ta and bb) or any(gcd(x, y) > 1 for x in ta for y in tb)

    def nonzero_tor(a, b):
        return any(gcd(x, y) > 1 for x in a[1] for y in b[1])

    zero = (0, [])
    c = -1
    for k in range(-1, top):
        deg = k + 1
        nz = any(nonzero_tensor(hx.get(i, zero), hy.get(k - i, zero)) for i in range(-1, k + 2))
        nz = nz or any(nonzero_tor(hx.get(i, zero), hy.get(k - 1 - i, zero)) for i in range(-1, k + 1))
        if nz:
            return c
        c = deg
    return c


def closed_form_ranges(n, coeffs, g):
    """``(max surjective d, max isomorphism d)`` from the clause inequalities solved by hand."""

    def floor_or_none(num, den):
        return None if num < 0 else num // den

    def below(x):  # largest integer d >= 0 with d < x
        d = -(-x.numerator // x.denominator) - 1
        return None if d < 0 else d

    special = n in (3, 7)
    s = Fraction(3 * n - 6, 3 * n - 5)
    if coeffs == "Z" or (coeffs == "Z_half" and special):
        if special:
            return floor_or_none(2 * g - 1, 3), floor_or_none(2 * g - 4, 3)
        return floor_or_none(g - 2, 2), floor_or_none(g - 4, 2)
    if coeffs == "Z_half":
        return floor_or_none(2 * g - 4, 3), floor_or_none(2 * g - 7, 3)
    if coeffs == "Q":
        base = s * g if special else s * (g - 1)
        return below(base), below(base - 1)
    raise ValueError(coeffs)


def t_by_minors(gram):
    """Largest k such that the gcd of all k x k minors is 1 (a summand of rank k lies in the image)."""
    n = len(gram)
    t = 0
    for k in range(1, n + 1):
        g = 0
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                g = gcd(g, det([[gram[r][c] for c in cols] for r in rows]))
                if g == 1:
                    break
            if g == 1:
                break
        if g != 1:
            break
        t = k
    return t
