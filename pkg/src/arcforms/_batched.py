"""Vectorised exact integer kernels over stacks of small matrices.

All routines accept arrays of shape ``(batch, ...)``.  They run in ``int64``
when an a-priori (Hadamard-type) bound proves nothing can overflow and fall
back to ``object`` arrays of Python integers otherwise, so results are
always exact.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

_SAFE = 2**62


def hadamard_bound(max_entry: int, k: int) -> int:
    """Upper bound for |det| of a k x k matrix with entries bounded by ``max_entry``."""
    if k == 0:
        return 1
    # (h * sqrt(k))^k, rounded up
    return (max_entry**2 * k) ** ((k + 1) // 2) if k % 2 else (max_entry**2 * k) ** (k // 2)


def exact_array(x, k: int | None = None) -> np.ndarray:
    """Return ``x`` as int64 if k x k Bareiss on it is overflow-free, else as object."""
    arr = np.asarray(x)
    if arr.dtype == object:
        return arr
    arr = arr.astype(np.int64, copy=False)
    if k is None:
        k = arr.shape[-1]
    h = int(np.abs(arr).max()) if arr.size else 0
    bound = hadamard_bound(max(h, 1), k)
    if bound * max(bound, h) < _SAFE:
        return arr
    return arr.astype(object)


def batch_det(X: np.ndarray) -> np.ndarray:
    """Determinants of a stack ``(b, k, k)`` by Bareiss elimination with row pivoting."""
    X = exact_array(X)
    b, k, _ = X.shape
    if k == 0:
        return np.ones(b, dtype=X.dtype)
    M = X.copy()
    sign = np.ones(b, dtype=X.dtype)
    prev = np.ones(b, dtype=X.dtype)
    alive = np.ones(b, dtype=bool)
    rows = np.arange(b)
    for i in range(k):
        nz = M[:, i:, i] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = nz.argmax(axis=1) + i
        swap = has & (piv != i)
        if swap.any():
            r = rows[swap]
            p = piv[swap]
            tmp = M[r, i, :].copy()
            M[r, i, :] = M[r, p, :]
            M[r, p, :] = tmp
            sign[swap] = -sign[swap]
        if i == k - 1:
            break
        pk = np.where(alive, M[:, i, i], 1)
        den = prev[:, None]
        for j in range(i + 1, k):
            M[:, j, i + 1:] = (M[:, j, i + 1:] * pk[:, None] - M[:, j, i][:, None] * M[:, i, i + 1:]) // den
            M[:, j, i] = 0
        prev = pk
    det = sign * M[:, k - 1, k - 1]
    det[~alive] = 0
    return det


def batch_minor_gcd(X: np.ndarray) -> np.ndarray:
    """gcd of all maximal (k x k) minors of each ``k x n`` matrix in the stack."""
    X = np.asarray(X)
    b, k, n = X.shape
    if k == 0:
        return np.ones(b, dtype=np.int64)
    if k > n:
        return np.zeros(b, dtype=np.int64)
    X = exact_array(X, k)
    g = np.zeros(b, dtype=X.dtype)
    for cols in combinations(range(n), k):
        g = np.gcd(g, batch_det(X[:, :, cols]))
    return g


def batch_unimodular(X: np.ndarray) -> np.ndarray:
    """Row sets of each matrix in the stack span a rank-k direct summand."""
    return batch_minor_gcd(X) == 1


def batch_column_reduce(X: np.ndarray):
    """Column-style Euclid on each ``k x n`` matrix: ``X @ U = [L | 0]``.

    Returns ``(L_diag, U, full_rank)`` where ``U`` is a stack of unimodular
    ``n x n`` matrices, ``L_diag`` the (nonnegative) pivots, and ``full_rank``
    flags matrices whose k rows are independent.  For full-rank rows the last
    ``n - k`` columns of ``U`` are a saturated kernel basis.
    """
    X = np.asarray(X)
    b, k, n = X.shape
    dtype = np.int64 if X.dtype != object else object
    A = X.astype(dtype).copy()
    U = np.broadcast_to(np.eye(n, dtype=np.int64), (b, n, n)).astype(dtype).copy()
    rows = np.arange(b)
    full = np.ones(b, dtype=bool)
    limit = 2**40
    for i in range(min(k, n)):
        while True:
            R = A[:, i, i:]
            nz = R != 0
            cnt = nz.sum(axis=1)
            todo = (cnt > 1) | ((cnt == 1) & ~nz[:, 0])
            if not todo.any():
                break
            absR = np.where(nz, np.abs(R), np.iinfo(np.int64).max if dtype != object else 10**300)
            j = absR.argmin(axis=1) + i
            sw = todo & (j != i)
            if sw.any():
                r, jj = rows[sw], j[sw]
                for M in (A, U):
                    tmp = M[r, :, i].copy()
                    M[r, :, i] = M[r, :, jj]
                    M[r, :, jj] = tmp
            p = np.where(A[:, i, i] == 0, 1, A[:, i, i])
            q = A[:, i, i + 1:] // p[:, None]
            q[~todo] = 0
            A[:, :, i + 1:] -= A[:, :, i][:, :, None] * q[:, None, :]
            U[:, :, i + 1:] -= U[:, :, i][:, :, None] * q[:, None, :]
            if dtype != object and max(np.abs(U).max(), np.abs(A).max()) > limit:
                return batch_column_reduce(X.astype(object))
        neg = A[:, i, i] < 0
        if neg.any():
            A[neg, :, i] = -A[neg, :, i]
            U[neg, :, i] = -U[neg, :, i]
        full &= A[:, i, i] != 0
    if k > n:
        full[:] = False
    diag = np.stack([A[:, i, i] for i in range(min(k, n))], axis=1) if min(k, n) else np.zeros((b, 0), dtype=dtype)
    return diag, U, full


def batch_unit_factor_count(G: np.ndarray) -> np.ndarray:
    """Number of Smith invariant factors equal to 1 for each ``m x m`` matrix."""
    G = np.asarray(G)
    b, m, _ = G.shape
    count = np.zeros(b, dtype=np.int64)
    if m == 0 or b == 0:
        return count
    still = np.ones(b, dtype=bool)
    for j in range(1, m + 1):
        idx = np.nonzero(still)[0]
        if not len(idx):
            break
        sub = exact_array(G[idx], j)
        g = np.zeros(len(idx), dtype=sub.dtype)
        for rs in combinations(range(m), j):
            for cs in combinations(range(m), j):
                g = np.gcd(g, batch_det(sub[:, rs][:, :, cs]))
        unit = g == 1
        count[idx[unit]] = j
        still[idx[~unit]] = False
    return count
