"""Finite simplicial complexes and posets: links, joins, homology, connectivity.

Simplices of each dimension are stored as a lexicographically sorted
``(count, k+1)`` array of vertex indices with increasing rows, which keeps
complexes with tens of millions of triangles manageable.  Vertex labels are
arbitrary hashable values; index ``i`` refers to ``vertices[i]``.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import ResourceLimitError
from .exact_linear import AbelianInvariants, IntMatrix, invariant_factors

__all__ = [
    "SimplicialComplex",
    "FinitePoset",
    "HomologyTable",
    "Pi1Status",
    "order_complex",
    "face_poset",
    "join",
    "reduced_homology",
    "homological_connectivity",
    "pi1_trivial",
    "edge_path_certificate",
    "DEFAULT_NNZ_CAP",
]

DEFAULT_NNZ_CAP = 2_000_000


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    """Injective integer keys for sorted simplex rows, order-preserving."""
    k = rows.shape[1]
    if base ** max(k, 1) < 2**62:
        key = np.zeros(len(rows), dtype=np.int64)
        for j in range(k):
            key = key * base + rows[:, j].astype(np.int64)
        return key
    key = np.zeros(len(rows), dtype=object)
    for j in range(k):
        key = key * base + rows[:, j].astype(object)
    return key


def _lexsort_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    return np.unique(rows, axis=0)


class SimplicialComplex:
    """A finite abstract simplicial complex (immutable after construction)."""

    def __init__(self, vertices: Sequence[Hashable], faces: Sequence[np.ndarray]):
        self.vertices = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ValueError("vertex labels must be distinct")
        faces = [np.asarray(f, dtype=np.int32).reshape(-1, k + 1) for k, f in enumerate(faces)]
        while faces and len(faces[-1]) == 0:
            faces.pop()
        if faces and len(faces[0]) != len(self.vertices):
            raise ValueError("every vertex must be a 0-simplex")
        self._faces = faces
        self._keys: dict[int, np.ndarray] = {}
        for f in faces:
            f.setflags(write=False)

    # -------------------------------------------------------------- constructors

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[Hashable]], vertices: Sequence[Hashable] | None = None):
        """Downward closure of a list of simplices (given by vertex labels)."""
        maximal = [tuple(s) for s in maximal]
        if vertices is None:
            seen = {}
            for s in maximal:
                for v in s:
                    seen.setdefault(v, None)
            try:
                vertices = sorted(seen)
            except TypeError:
                vertices = list(seen)
        vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        by_dim: dict[int, set] = defaultdict(set)
        for s in maximal:
            if not s:
                continue
            idx = tuple(sorted({index[v] for v in s}))
            for k in range(1, len(idx) + 1):
                by_dim[k - 1].update(combinations(idx, k))
        by_dim[0].update((i,) for i in range(len(vertices)))
        top = max(by_dim) if vertices else -1
        faces = [
            _lexsort_rows(np.array(sorted(by_dim[k]), dtype=np.int32).reshape(-1, k + 1)) for k in range(top + 1)
        ]
        return cls(vertices, faces)

    @classmethod
    def from_arrays(cls, vertices: Sequence[Hashable], faces: Sequence[np.ndarray], check: bool = True):
        """Build from per-dimension index arrays (rows need not be sorted)."""
        clean = []
        for k, f in enumerate(faces):
            f = np.sort(np.asarray(f, dtype=np.int32).reshape(-1, k + 1), axis=1)
            clean.append(_unique_rows(f))
        c = cls(vertices, clean)
        if check:
            c.check_closed()
        return c

    @classmethod
    def simplex(cls, n: int) -> SimplicialComplex:
        return cls.from_maximal([tuple(range(n + 1))], vertices=range(n + 1))

    @classmethod
    def sphere(cls, n: int) -> SimplicialComplex:
        """Boundary of the (n+1)-simplex."""
        return cls.from_maximal(combinations(range(n + 2), n + 1), vertices=range(n + 2))

    @classmethod
    def empty(cls) -> SimplicialComplex:
        return cls((), [])

    # -------------------------------------------------------------- accessors

    @property
    def dim(self) -> int:
        return len(self._faces) - 1

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def simplices(self, k: int) -> np.ndarray:
        if 0 <= k < len(self._faces):
            return self._faces[k]
        return np.zeros((0, k + 1), dtype=np.int32)

    def count(self, k: int) -> int:
        return len(self.simplices(k))

    def f_vector(self) -> list[int]:
        return [len(f) for f in self._faces]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(f) for k, f in enumerate(self._faces))

    def labelled(self, k: int) -> list[tuple]:
        return [tuple(self.vertices[i] for i in row) for row in self.simplices(k).tolist()]

    def all_simplices(self) -> list[tuple]:
        return [s for k in range(self.dim + 1) for s in self.labelled(k)]

    def index_of(self, label: Hashable) -> int:
        return self._index[label]

    def keys(self, k: int) -> np.ndarray:
        if k not in self._keys:
            self._keys[k] = _encode(self.simplices(k), max(len(self.vertices), 1))
        return self._keys[k]

    def lookup(self, k: int, rows: np.ndarray) -> np.ndarray:
        """Positions of sorted index rows in the k-simplex array, -1 where absent."""
        rows = np.asarray(rows).reshape(-1, k + 1)
        keys = self.keys(k)
        if len(keys) == 0:
            return np.full(len(rows), -1, dtype=np.int64)
        q = _encode(rows, max(len(self.vertices), 1))
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, len(keys) - 1)
        hit = keys[pos] == q
        return np.where(hit, pos, -1).astype(np.int64)

    def contains(self, simplex: Iterable[Hashable]) -> bool:
        try:
            idx = sorted({self._index[v] for v in simplex})
        except KeyError:
            return False
        if not idx:
            return True
        return bool(self.lookup(len(idx) - 1, np.array([idx]))[0] >= 0)

    def check_closed(self):
        for k in range(1, self.dim + 1):
            f = self.simplices(k)
            for j in range(k + 1):
                facets = np.delete(f, j, axis=1)
                if (self.lookup(k - 1, facets) < 0).any():
                    raise ValueError(f"family is not downward closed in dimension {k}")

    def boundary_incidence(self, k: int) -> np.ndarray:
        """``(count_k, k+1)`` indices of the facets of each k-simplex (facet j omits vertex j)."""
        f = self.simplices(k)
        out = np.empty((len(f), k + 1), dtype=np.int64)
        for j in range(k + 1):
            out[:, j] = self.lookup(k - 1, np.delete(f, j, axis=1))
        return out

    def cofacet_counts(self, k: int) -> np.ndarray:
        """Number of (k+1)-simplices containing each k-simplex."""
        counts = np.zeros(self.count(k), dtype=np.int64)
        if self.count(k + 1):
            inc = self.boundary_incidence(k + 1)
            np.add.at(counts, inc.ravel(), 1)
        return counts

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for k in range(self.dim + 1):
            free = np.nonzero(self.cofacet_counts(k) == 0)[0]
            rows = self.simplices(k)[free]
            out.extend(tuple(self.vertices[i] for i in r) for r in rows.tolist())
        return out

    def skeleton(self, k: int) -> SimplicialComplex:
        return SimplicialComplex(self.vertices, self._faces[: k + 1])

    def link(self, simplex: Iterable[Hashable]) -> SimplicialComplex:
        """Link of a simplex; vertex labels are kept."""
        idx = sorted({self._index[v] for v in simplex})
        if not self.contains([self.vertices[i] for i in idx]):
            raise ValueError("simplex is not in the complex")
        p = len(idx) - 1
        pieces = []
        for k in range(p + 1, self.dim + 1):
            f = self.simplices(k)
            mask = np.ones(len(f), dtype=bool)
            for v in idx:
                mask &= (f == v).any(axis=1)
            rows = f[mask]
            keep = ~np.isin(rows, idx)
            pieces.append(rows[keep].reshape(len(rows), k - p))
        if not pieces or len(pieces[0]) == 0:
            return SimplicialComplex.empty()
        verts = pieces[0][:, 0]
        remap = np.full(len(self.vertices), -1, dtype=np.int64)
        remap[verts] = np.arange(len(verts))
        faces = [remap[r].astype(np.int32) for r in pieces]
        return SimplicialComplex([self.vertices[i] for i in verts], faces)

    def components(self) -> tuple[int, np.ndarray]:
        n = len(self.vertices)
        e = self.simplices(1)
        g = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
        return connected_components(g, directed=False)

    # -------------------------------------------------------------- serialisation

    def to_json(self) -> dict:
        return {
            "vertices": [_label_json(v) for v in self.vertices],
            "maximal_simplices": [[_label_json(v) for v in s] for s in self.maximal_simplices()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> SimplicialComplex:
        verts = [_label_key(v) for v in obj.get("vertices", [])]
        maximal = [[_label_key(v) for v in s] for s in obj.get("maximal_simplices", [])]
        known = set(verts)
        for s in maximal:
            for v in s:
                if v not in known:
                    verts.append(v)
                    known.add(v)
        return cls.from_maximal(maximal, vertices=verts)

    def __repr__(self) -> str:
        return f"SimplicialComplex(f_vector={self.f_vector()})"


def _label_json(v):
    if isinstance(v, tuple):
        return [_label_json(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _label_key(v):
    if isinstance(v, list):
        return tuple(_label_key(x) for x in v)
    return v


# ------------------------------------------------------------------ posets

@dataclass(frozen=True)
class FinitePoset:
    """A finite strict partial order given by its relation pairs ``(a, b)`` meaning ``a < b``."""

    elements: tuple
    less_than: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "less_than", frozenset(tuple(p) for p in self.less_than))
        elems = set(self.elements)
        if len(elems) != len(self.elements):
            raise ValueError("poset elements must be distinct")
        up = defaultdict(set)
        for a, b in self.less_than:
            if a not in elems or b not in elems:
                raise ValueError(f"relation ({a!r}, {b!r}) mentions an unknown element")
            if a == b:
                raise ValueError("strict order must be irreflexive")
            up[a].add(b)
        for a, b in self.less_than:
            for c in up[b]:
                if (a, c) not in self.less_than:
                    raise ValueError(f"relation is not transitive: {a!r} < {b!r} < {c!r}")

    @classmethod
    def from_cover_relation(cls, elements, covers) -> FinitePoset:
        """Transitive closure of the given relation."""
        up = defaultdict(set)
        for a, b in covers:
            up[a].add(b)
        rel = set()
        for a in elements:
            stack, seen = list(up[a]), set()
            while stack:
                b = stack.pop()
                if b in seen:
                    continue
                seen.add(b)
                rel.add((a, b))
                stack.extend(up[b])
        return cls(tuple(elements), frozenset(rel))

    def lt(self, a, b) -> bool:
        return (a, b) in self.less_than

    def below(self, x) -> FinitePoset:
        keep = [e for e in self.elements if (e, x) in self.less_than]
        return self.subposet(keep)

    def above(self, x) -> FinitePoset:
        keep = [e for e in self.elements if (x, e) in self.less_than]
        return self.subposet(keep)

    def interval(self, x, y) -> FinitePoset:
        keep = [e for e in self.elements if (x, e) in self.less_than and (e, y) in self.less_than]
        return self.subposet(keep)

    def subposet(self, keep) -> FinitePoset:
        ks = set(keep)
        return FinitePoset(tuple(keep), frozenset(p for p in self.less_than if p[0] in ks and p[1] in ks))


def order_complex(p: FinitePoset) -> SimplicialComplex:
    """Simplicial complex of chains of a finite poset."""
    up = defaultdict(list)
    for a, b in p.less_than:
        up[a].append(b)
    index = {e: i for i, e in enumerate(p.elements)}
    for a in up:
        up[a].sort(key=index.__getitem__)
    maximal = []

    def extend(chain):
        nxt = up[chain[-1]]
        if not nxt:
            maximal.append(tuple(chain))
            return
        for b in nxt:
            extend(chain + [b])

    minimal = [e for e in p.elements if not any((x, e) in p.less_than for x in p.elements)]
    for m in minimal:
        extend([m])
    return SimplicialComplex.from_maximal(maximal, vertices=p.elements)


def face_poset(c: SimplicialComplex) -> FinitePoset:
    """Nonempty simplices ordered by strict inclusion."""
    simplices = c.all_simplices()
    sets = [frozenset(s) for s in simplices]
    rel = frozenset(
        (simplices[i], simplices[j])
        for i in range(len(sets))
        for j in range(len(sets))
        if len(sets[i]) < len(sets[j]) and sets[i] < sets[j]
    )
    return FinitePoset(tuple(simplices), rel)


def join(x: SimplicialComplex, y: SimplicialComplex) -> SimplicialComplex:
    """Simplicial join; vertices are relabelled ``(0, v)`` and ``(1, w)``."""
    verts = [(0, v) for v in x.vertices] + [(1, w) for w in y.vertices]
    mx = [tuple((0, v) for v in s) for s in x.maximal_simplices()] or [()]
    my = [tuple((1, w) for w in s) for s in y.maximal_simplices()] or [()]
    return SimplicialComplex.from_maximal([a + b for a in mx for b in my], vertices=verts)


# ------------------------------------------------------------------ homology

@dataclass(frozen=True)
class HomologyTable:
    """Reduced integral homology in degrees ``0..max_degree``."""

    groups: dict

    def __getitem__(self, k: int) -> AbelianInvariants:
        return self.groups[k]

    @property
    def max_degree(self) -> int:
        return max(self.groups) if self.groups else -1

    def betti(self, k: int) -> int:
        return self.groups[k].free_rank

    def vanishes_through(self, k: int) -> bool:
        return all(self.groups[i].is_trivial for i in range(0, k + 1))

    def to_json(self) -> dict:
        return {str(k): g.to_json() for k, g in sorted(self.groups.items())}

    def __str__(self) -> str:
        return "\n".join(f"H~{k} = {g}" for k, g in sorted(self.groups.items()))


def _sparse_factors(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> tuple[int, list[int]]:
    """Rank and nonunit Smith factors of a sparse integer matrix.

    Unit pivots are eliminated first (each contributes a factor 1 and only
    a Schur-complement update); whatever is left has no unit entries and is
    handed to the dense Smith normal form.
    """
    by_col: dict[int, dict[int, int]] = defaultdict(dict)
    by_row: dict[int, set] = defaultdict(set)
    for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        if v:
            by_col[c][r] = v
            by_row[r].add(c)
    rank = 0
    queue = sorted(by_col, key=lambda c: len(by_col[c]))
    while True:
        progressed = False
        for c in queue:
            col = by_col.get(c)
            if not col:
                by_col.pop(c, None)
                continue
            units = [r for r, v in col.items() if v in (1, -1)]
            if not units:
                continue
            r = min(units, key=lambda rr: len(by_row[rr]))
            v = col[r]
            pivot_col = col
            for c2 in list(by_row[r]):
                if c2 == c:
                    continue
                other = by_col[c2]
                factor = other[r] * v
                for r2, a in pivot_col.items():
                    nv = other.get(r2, 0) - factor * a
                    if nv:
                        if r2 not in other:
                            by_row[r2].add(c2)
                        other[r2] = nv
                    elif r2 in other:
                        del other[r2]
                        by_row[r2].discard(c2)
                if not other:
                    del by_col[c2]
            for r2 in pivot_col:
                by_row[r2].discard(c)
            del by_col[c]
            del by_row[r]
            rank += 1
            progressed = True
        if not progressed:
            break
        queue = sorted(by_col, key=lambda c: len(by_col[c]))
    if not by_col:
        return rank, []
    rset = sorted({r for col in by_col.values() for r in col})
    cset = sorted(by_col)
    if len(rset) * len(cset) > 4_000_000:
        raise ResourceLimitError(f"dense remainder {len(rset)}x{len(cset)} after unit elimination is too large")
    ri = {r: i for i, r in enumerate(rset)}
    dense = [[0] * len(cset) for _ in rset]
    for j, c in enumerate(cset):
        for r, v in by_col[c].items():
            dense[ri[r]][j] = v
    factors = invariant_factors(IntMatrix.from_rows(dense, cols=len(cset)))
    return rank + len(factors), [d for d in factors if d > 1]


def boundary_matrix(c: SimplicialComplex, k: int):
    """Sparse ``d_k`` as coordinate arrays ``(rows, cols, vals)`` (k-simplices are columns)."""
    inc = c.boundary_incidence(k)
    m = len(inc)
    cols = np.repeat(np.arange(m, dtype=np.int64), k + 1)
    rows = inc.ravel()
    vals = np.tile(np.array([(-1) ** j for j in range(k + 1)], dtype=np.int64), m)
    return rows, cols, vals


def _check_dd(c: SimplicialComplex, k: int):
    """Assert ``d_{k-1} d_k = 0`` using sparse products."""
    if k < 2 or c.count(k) == 0:
        return
    r, cc, v = boundary_matrix(c, k - 1)
    a = coo_matrix((v, (r, cc)), shape=(c.count(k - 2), c.count(k - 1))).tocsr()
    r, cc, v = boundary_matrix(c, k)
    b = coo_matrix((v, (r, cc)), shape=(c.count(k - 1), c.count(k))).tocsr()
    prod = a @ b
    prod.eliminate_zeros()
    if prod.nnz:
        raise ArithmeticError(f"boundary of boundary is nonzero in degree {k}")


def reduced_homology(c: SimplicialComplex, max_degree: int, nnz_cap: int = DEFAULT_NNZ_CAP) -> HomologyTable:
    """Reduced integral homology ``H~_0..H~_max_degree``."""
    groups: dict[int, AbelianInvariants] = {}
    if max_degree < 0:
        return HomologyTable(groups)
    n = [c.count(k) for k in range(max_degree + 2)]
    needed = sum((k + 1) * n[k] for k in range(2, max_degree + 2))
    if needed > nnz_cap:
        raise ResourceLimitError(f"boundary matrices need {needed} nonzeros, cap is {nnz_cap}")
    ncomp = c.components()[0] if n[0] else 0
    # d_0 is the augmentation, d_1 has rank V - components and free cokernel
    ranks = {0: 1 if n[0] else 0, 1: n[0] - ncomp if n[0] else 0}
    torsion = {0: [], 1: []}
    for k in range(2, max_degree + 2):
        if n[k] == 0:
            ranks[k], torsion[k] = 0, []
            continue
        _check_dd(c, k)
        r, cc, v = boundary_matrix(c, k)
        ranks[k], torsion[k] = _sparse_factors(r, cc, v)
    for k in range(max_degree + 1):
        free = n[k] - ranks[k] - ranks[k + 1]
        groups[k] = AbelianInvariants(tuple(torsion[k + 1]), free)
    return HomologyTable(groups)


def homological_connectivity(c: SimplicialComplex, cap: int, nnz_cap: int = DEFAULT_NNZ_CAP) -> int:
    """-2 if empty, else the largest ``k <= cap`` with ``H~_i = 0`` for ``i <= k`` (-1 if none).

    A return value equal to ``cap`` means "at least cap".
    """
    if c.is_empty:
        return -2
    if cap < 0:
        return cap
    table = reduced_homology(c, cap, nnz_cap)
    k = -1
    while k + 1 <= cap and table[k + 1].is_trivial:
        k += 1
    return k


# ------------------------------------------------------------------ fundamental group

class Pi1Status(str, enum.Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNKNOWN = "unknown"


def _edge_path_data(c: SimplicialComplex):
    """Spanning-tree edges, and for each triangle the indices of its three edges."""
    n = c.count(0)
    e = c.simplices(1)
    g = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
    g = (g + g.T).tocsr()
    _, pred = breadth_first_order(g, 0, directed=False, return_predecessors=True)
    v = np.nonzero(pred >= 0)[0]
    tree = np.sort(np.stack([pred[v], v], axis=1), axis=1)
    known = np.zeros(len(e), dtype=bool)
    if len(tree):
        known[c.lookup(1, tree)] = True
    tri = c.boundary_incidence(2) if c.count(2) else np.zeros((0, 3), dtype=np.int64)
    # facet j omits vertex j: columns are edges bc, ac, ab
    return known, tri


def edge_path_certificate(c: SimplicialComplex) -> tuple[bool, np.ndarray]:
    """Propagate triviality of edge generators through triangles.

    Tree edges are trivial; whenever two edges of a triangle are trivial so
    is the third.  Returns ``(all_trivial, known_mask)``.  ``all_trivial``
    certifies that the edge-path group, hence also ``H~_1``, vanishes.
    """
    known, tri = _edge_path_data(c)
    while True:
        k = known[tri]
        cnt = k.sum(axis=1)
        hits = cnt == 2
        if not hits.any():
            break
        missing = tri[hits][~k[hits]]
        known[missing] = True
    return bool(known.all()), known


def pi1_trivial(c: SimplicialComplex, max_steps: int = 10_000, max_relator: int = 64) -> Pi1Status:
    """Best-effort decision of whether the fundamental group of a connected complex vanishes."""
    if c.is_empty or c.components()[0] != 1:
        raise ValueError("fundamental group needs a nonempty connected complex")
    all_known, known = edge_path_certificate(c)
    if all_known:
        return Pi1Status.TRIVIAL
    _, tri = _edge_path_data(c)
    gens = np.nonzero(~known)[0]
    gid = {int(e): i + 1 for i, e in enumerate(gens)}
    relators = []
    for t_edges in tri[(~known[tri]).any(axis=1)].tolist():
        bc, ac, ab = t_edges
        # loop a -> b -> c -> a
        word = [gid.get(ab, 0), gid.get(bc, 0), -gid.get(ac, 0)]
        relators.append([x for x in word if x])
    if _tietze_trivial([list(r) for r in relators], len(gens), max_steps, max_relator):
        return Pi1Status.TRIVIAL
    if len(gens) > 400:
        return Pi1Status.UNKNOWN
    mat = [[0] * len(gens) for _ in relators]
    for i, r in enumerate(relators):
        for x in r:
            mat[i][abs(x) - 1] += 1 if x > 0 else -1
    if not relators:
        return Pi1Status.NONTRIVIAL
    factors = invariant_factors(IntMatrix.from_rows(mat, cols=len(gens)))
    if len(gens) - len(factors) > 0 or any(d > 1 for d in factors):
        return Pi1Status.NONTRIVIAL
    return Pi1Status.UNKNOWN


def _reduce(word: list[int]) -> list[int]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == -out[-1]:
        out = out[1:-1]
    return out


def _tietze_trivial(relators: list[list[int]], ngens: int, max_steps: int, max_relator: int) -> bool:
    """Eliminate generators occurring exactly once in a short relator; True if none remain."""
    alive = set(range(1, ngens + 1))
    rels = [_reduce(r) for r in relators]
    rels = [r for r in rels if r]
    steps = 0
    while alive and steps < max_steps:
        steps += 1
        choice = None
        for i, r in enumerate(rels):
            if len(r) > max_relator:
                continue
            counts = defaultdict(int)
            for x in r:
                counts[abs(x)] += 1
            once = [g for g, k in counts.items() if k == 1]
            if once:
                choice = (i, once[0])
                break
        if choice is None:
            return False
        i, g = choice
        r = rels.pop(i)
        pos = next(j for j, x in enumerate(r) if abs(x) == g)
        # r = u g^e v = 1  =>  g^e = u^-1 v^-1
        rotated = r[pos + 1:] + r[:pos]
        e = r[pos]
        inv = [-x for x in reversed(rotated)]
        repl = inv if e > 0 else rotated
        repl_inv = [-x for x in reversed(repl)]
        new = []
        for w in rels:
            out = []
            for x in w:
                if x == g:
                    out.extend(repl)
                elif x == -g:
                    out.extend(repl_inv)
                else:
                    out.append(x)
            out = _reduce(out)
            if out:
                new.append(out)
        rels = new
        alive.discard(g)
    return not alive
