"""Height-truncated complexes of unimodular vectors in a coset, and WCM checks.

For a free module ``N = Z^n``, a submodule ``N'`` (given by generating
columns) and a coset representative ``delta0``, the complex has as vertices
the unimodular vectors of ``delta0 + N'`` and as simplices the jointly
unimodular sets.  The algebraic arc complex of a form ``(M, lambda, delta)``
is the instance ``N = M^dual``, ``N' = lambda^dual(M)``.  Only vectors of
sup-norm at most ``height`` are enumerated, so every complex built here is a
finite subcomplex of an infinite one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._batched import batch_unimodular
from .complexes import (
    DEFAULT_NNZ_CAP,
    Pi1Status,
    SimplicialComplex,
    edge_path_certificate,
    pi1_trivial,
    reduced_homology,
)
from .errors import DimensionMismatchError, ResourceLimitError
from .exact_linear import IntMatrix, as_matrix, invariant_factors, is_unimodular, smith_normal_form
from .skew_forms import (
    BoundaryElement,
    BoundaryQuotient,
    SkewForm,
    boundary_group,
    cut_genera_batch,
    genus,
    max_order_delta,
)

__all__ = [
    "ValidAlgebraicData",
    "CosetComplexSpec",
    "WcmReport",
    "enumerate_vertices",
    "build_complex",
    "t_of_pair",
    "t_search",
    "link_component_counts",
    "verify_wcm",
    "cut_bounds_check",
    "DEFAULT_VERTEX_CAP",
    "DEFAULT_SIMPLEX_CAP",
]

DEFAULT_VERTEX_CAP = 5000
DEFAULT_SIMPLEX_CAP = 40_000_000
_CHUNK = 400_000

CONNECTIVITY_NOTE = (
    "Connectivity is certified homologically (reduced integral homology) and, "
    "in degree 1, by an edge-path group check; higher homotopy groups are not examined."
)


@dataclass(frozen=True)
class CosetComplexSpec:
    """Parameters of a truncated coset complex inside ``Z^ambient_rank``."""

    ambient_rank: int
    submodule_gens: IntMatrix
    delta0: tuple[int, ...]
    height: int
    max_dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "submodule_gens", as_matrix(self.submodule_gens))
        object.__setattr__(self, "delta0", tuple(int(x) for x in self.delta0))
        if self.height < 0:
            raise ValueError("height must be nonnegative")
        if self.max_dim < 0:
            raise ValueError("max_dim must be nonnegative")
        if len(self.delta0) != self.ambient_rank or self.submodule_gens.rows != self.ambient_rank:
            raise DimensionMismatchError("coset data does not match the ambient rank")

    def with_height(self, height: int) -> CosetComplexSpec:
        return CosetComplexSpec(self.ambient_rank, self.submodule_gens, self.delta0, height, self.max_dim)

    def with_max_dim(self, max_dim: int) -> CosetComplexSpec:
        return CosetComplexSpec(self.ambient_rank, self.submodule_gens, self.delta0, self.height, max_dim)

    def to_json(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "submodule_gens": self.submodule_gens.to_json(),
            "delta0": list(self.delta0),
            "height": self.height,
            "max_dim": self.max_dim,
        }


@dataclass(frozen=True)
class ValidAlgebraicData:
    """A form together with a boundary element."""

    form: SkewForm
    delta: BoundaryElement

    def __post_init__(self):
        q = BoundaryQuotient(self.form)
        if self.delta.ambient != q.group:
            raise ValueError("boundary element lives in a different group")
        if tuple(self.delta.representative) != q.normal_form(self.delta.representative):
            raise ValueError("boundary representative is not in normal form")

    @classmethod
    def from_form(cls, form: SkewForm, delta="auto") -> ValidAlgebraicData:
        """``delta`` is ``"auto"`` (maximal order, or 0 if the boundary vanishes) or a vector in ``M^dual``."""
        q = BoundaryQuotient(form)
        if isinstance(delta, str):
            if delta != "auto":
                raise ValueError(f"unknown delta choice {delta!r}")
            if q.group.is_trivial:
                return cls(form, q.element((0,) * form.rank))
            return cls(form, max_order_delta(form))
        return cls(form, q.element(tuple(int(x) for x in delta)))

    def coset_spec(self, height: int, max_dim: int = 2) -> CosetComplexSpec:
        return CosetComplexSpec(self.form.rank, self.form.gram, self.delta.representative, height, max_dim)


# ------------------------------------------------------------------ vertices and simplices

def _coset_test(spec: CosetComplexSpec):
    """A vectorised membership test for ``delta0 + N'``."""
    G = spec.submodule_gens
    n = spec.ambient_rank
    if G.cols == 0:
        moduli = [0] * n
        U = IntMatrix.identity(n)
    else:
        U, S, _ = smith_normal_form(G)
        diag = [S[i, i] for i in range(min(S.rows, S.cols)) if S[i, i]]
        moduli = diag + [0] * (n - len(diag))
    Ua = np.array(U.to_lists(), dtype=object).reshape(n, n)
    d0 = np.array(spec.delta0, dtype=object)

    def member(X: np.ndarray) -> np.ndarray:
        if len(X) == 0:
            return np.zeros(0, dtype=bool)
        shifted = X.astype(object) - d0
        bound = int(np.abs(Ua).max(initial=0)) * n * (spec.height + max((abs(x) for x in spec.delta0), default=0))
        if bound < 2**62:
            Y = shifted.astype(np.int64) @ Ua.astype(np.int64).T
        else:
            Y = shifted @ Ua.T
        ok = np.ones(len(X), dtype=bool)
        for i, s in enumerate(moduli):
            ok &= (Y[:, i] == 0) if s == 0 else (Y[:, i] % s == 0)
        return ok

    return member


def enumerate_vertices(spec: CosetComplexSpec, candidate_cap: int = 20_000_000) -> np.ndarray:
    """Unimodular vectors of the coset with sup-norm at most the height, in lexicographic order."""
    n, B = spec.ambient_rank, spec.height
    if (2 * B + 1) ** n > candidate_cap:
        raise ResourceLimitError(f"{(2 * B + 1) ** n} candidate vectors exceed the cap {candidate_cap}")
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    axis = np.arange(-B, B + 1, dtype=np.int64)
    X = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    g = np.gcd.reduce(X, axis=1)
    X = X[g == 1]
    return X[_coset_test(spec)(X)]


def _grow(X: np.ndarray, faces: list[np.ndarray], adj: np.ndarray, simplex_cap: int) -> np.ndarray:
    """Unimodular (p+1)-simplices extending the p-simplices ``faces[-1]``."""
    S = faces[-1]
    m = len(X)
    p = S.shape[1] - 1
    out = []
    total = 0
    step = max(1, _CHUNK // max(m, 1))
    col = np.arange(m)
    for start in range(0, len(S), step):
        block = S[start:start + step]
        mask = adj[block[:, 0]].copy()
        for j in range(1, p + 1):
            mask &= adj[block[:, j]]
        mask &= col[None, :] > block[:, -1][:, None]
        r, w = np.nonzero(mask)
        if not len(r):
            continue
        cand = np.concatenate([block[r], w[:, None].astype(block.dtype)], axis=1)
        for s in range(0, len(cand), _CHUNK):
            c = cand[s:s + _CHUNK]
            ok = batch_unimodular(X[c])
            kept = c[ok]
            total += len(kept)
            if total > simplex_cap:
                raise ResourceLimitError(f"more than {simplex_cap} simplices in dimension {p + 1}")
            out.append(kept)
    if not out:
        return np.zeros((0, p + 2), dtype=np.int32)
    return np.concatenate(out).astype(np.int32)


def build_complex(
    spec: CosetComplexSpec,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    simplex_cap: int = DEFAULT_SIMPLEX_CAP,
) -> SimplicialComplex:
    """The truncated complex up to dimension ``spec.max_dim``; vertex labels are integer tuples."""
    X = enumerate_vertices(spec)
    m = len(X)
    if m > vertex_cap:
        raise ResourceLimitError(f"{m} vertices exceed the vertex cap {vertex_cap}")
    labels = [tuple(int(v) for v in row) for row in X]
    if m == 0:
        return SimplicialComplex.empty()
    faces = [np.arange(m, dtype=np.int32).reshape(-1, 1)]
    if spec.max_dim >= 1 and m > 1:
        adj = np.zeros((m, m), dtype=bool)
        step = max(1, _CHUNK // m)
        for i0 in range(0, m, step):
            rows = np.arange(i0, min(m, i0 + step))
            ii, jj = np.meshgrid(rows, np.arange(m), indexing="ij")
            keep = jj > ii
            ii, jj = ii[keep], jj[keep]
            if not len(ii):
                continue
            ok = batch_unimodular(np.stack([X[ii], X[jj]], axis=1))
            adj[ii[ok], jj[ok]] = True
        adj |= adj.T
        e = np.argwhere(np.triu(adj, 1)).astype(np.int32)
        if len(e) > simplex_cap:
            raise ResourceLimitError(f"more than {simplex_cap} edges")
        faces.append(e)
        for _ in range(2, spec.max_dim + 1):
            if len(faces[-1]) == 0:
                break
            faces.append(_grow(X, faces, adj, simplex_cap))
    return SimplicialComplex(labels, faces)


def t_of_pair(ambient_rank: int, submodule_gens) -> int:
    """Largest rank of a direct summand of ``Z^n`` contained in the column span of the generators."""
    G = as_matrix(submodule_gens) if not isinstance(submodule_gens, IntMatrix) else submodule_gens
    if G.rows != ambient_rank:
        raise DimensionMismatchError("generator matrix does not match the ambient rank")
    if G.cols == 0:
        return 0
    return sum(1 for d in invariant_factors(G) if d == 1)


def t_search(ambient_rank: int, submodule_gens, coeff_height: int = 1, budget: int = 200_000) -> tuple[int, bool, list]:
    """Search for large unimodular sets inside the submodule.

    Candidates are the primitive vectors ``G c`` with ``|c|_inf <= coeff_height``.
    Returns ``(size, exhaustive, witness)``; ``size`` never exceeds the true
    value, and equals it whenever a witness of that size is found.
    """
    G = as_matrix(submodule_gens)
    n = ambient_rank
    if G.cols == 0:
        return 0, True, []
    cols = np.array(G.to_lists(), dtype=object).reshape(n, G.cols)
    seen = set()
    cands = []
    for c in product(range(-coeff_height, coeff_height + 1), repeat=G.cols):
        v = tuple(int(x) for x in cols @ np.array(c, dtype=object))
        if v in seen or math.gcd(*v) != 1:
            continue
        seen.add(v)
        cands.append(v)
    cands.sort(key=lambda v: (max(abs(x) for x in v), v))
    upper = sum(1 for _ in invariant_factors(G))  # rank of the submodule
    best: list = []
    calls = 0
    exhausted = True

    def dfs(chosen, start):
        nonlocal best, calls, exhausted
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) == upper:
            return True
        for i in range(start, len(cands)):
            if len(chosen) + (len(cands) - i) <= len(best):
                return False
            calls += 1
            if calls > budget:
                exhausted = False
                return True
            trial = chosen + [cands[i]]
            if is_unimodular(trial) and dfs(trial, i + 1):
                return True
        return False

    dfs([], 0)
    return len(best), exhausted or len(best) == upper, best


# ------------------------------------------------------------------ connectivity of links

def link_component_counts(c: SimplicialComplex, p: int) -> np.ndarray:
    """Number of path components of the link of every p-simplex (0 for an empty link)."""
    n_p = c.count(p)
    if n_p == 0:
        return np.zeros(0, dtype=np.int64)
    n1 = c.count(p + 1)
    if n1 == 0:
        return np.zeros(n_p, dtype=np.int64)
    # node (tau, j): the vertex opposite position j of the (p+1)-simplex tau,
    # seen in the link of the p-simplex tau minus that vertex
    inc1 = c.boundary_incidence(p + 1)
    width = p + 2
    nodes = n1 * width
    rows, cols = [], []
    n2 = c.count(p + 2)
    for s in range(0, n2, _CHUNK):
        block = c.simplices(p + 2)[s:s + _CHUNK]
        inc2 = _incidence_block(c, p + 2, block)
        for a in range(p + 3):
            for b in range(a + 1, p + 3):
                tau1 = inc2[:, a]  # omits vertex a, contains vertex b at position b-1
                tau2 = inc2[:, b]  # omits vertex b, contains vertex a at position a
                rows.append((tau1 * width + (b - 1)).astype(np.int64))
                cols.append((tau2 * width + a).astype(np.int64))
    if rows:
        r = np.concatenate(rows)
        q = np.concatenate(cols)
    else:
        r = q = np.zeros(0, dtype=np.int64)
    g = coo_matrix((np.ones(len(r), dtype=np.int8), (r, q)), shape=(nodes, nodes))
    _, label = connected_components(g, directed=False)
    sigma = inc1.ravel()
    key = np.unique(sigma.astype(np.int64) * nodes + label.astype(np.int64))
    return np.bincount((key // nodes), minlength=n_p).astype(np.int64)


def _incidence_block(c: SimplicialComplex, k: int, block: np.ndarray) -> np.ndarray:
    out = np.empty((len(block), k + 1), dtype=np.int64)
    for j in range(k + 1):
        out[:, j] = c.lookup(k - 1, np.delete(block, j, axis=1))
    return out


# ------------------------------------------------------------------ reports

@dataclass
class WcmReport:
    """Outcome of checking the weak Cohen-Macaulay conditions on a truncated complex."""

    params: dict
    thresholds: list = field(default_factory=list)
    homology_tables: dict = field(default_factory=dict)
    pi1_status: str = "not-required"
    verdict: str = "consistent"
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "thresholds": self.thresholds,
            "homology_tables": self.homology_tables,
            "pi1_status": self.pi1_status,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _coset_provably_empty(spec: CosetComplexSpec) -> bool:
    """Every vector of the coset has all entries divisible by a common factor > 1."""
    entries = list(spec.delta0) + [x for r in spec.submodule_gens.entries for x in r]
    return math.gcd(*entries) != 1 if entries else True


def verify_wcm(
    spec: CosetComplexSpec,
    target_dim: int | None = None,
    f_values: Callable[[tuple], int] | None = None,
    complex: SimplicialComplex | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    nnz_cap: int = DEFAULT_NNZ_CAP,
) -> WcmReport:
    """Check the four weak Cohen-Macaulay conditions in the degrees the truncation can see.

    ``target_dim`` defaults to ``t - 2``.  ``f_values`` maps a simplex (tuple
    of vertex labels) to an integer and defaults to its dimension.  Homology
    of the complex is exact below degree ``max_dim``; links of p-simplices
    are exact below degree ``max_dim - p - 1``.
    """
    t = t_of_pair(spec.ambient_rank, spec.submodule_gens)
    n = t - 2 if target_dim is None else target_dim
    K = complex if complex is not None else build_complex(spec, vertex_cap=vertex_cap)
    D = spec.max_dim
    report = WcmReport(
        params={
            "t": t,
            "target_dim": n,
            "height": spec.height,
            "max_dim": D,
            "f": "dim" if f_values is None else "custom",
            "f_vector": K.f_vector(),
        },
        notes=[CONNECTIVITY_NOTE],
    )
    hard_fail = False
    soft_fail = False

    def f_of(k: int) -> np.ndarray:
        if f_values is None:
            return np.full(K.count(k), k, dtype=np.int64)
        return np.array([f_values(s) for s in K.labelled(k)], dtype=np.int64)

    # (i) the complex is (n-1)-connected
    need = n - 1
    entry = {"condition": "i", "object": "complex", "required": need, "checked_through": None, "status": "holds"}
    if need >= -1:
        if K.is_empty:
            entry["status"] = "fails"
            entry["checked_through"] = -1
            if _coset_provably_empty(spec):
                hard_fail = True
                entry["reason"] = "coset contains no unimodular vector"
            else:
                soft_fail = True
        else:
            top = min(need, D - 1)
            entry["checked_through"] = top
            table = {}
            for k in range(0, top + 1):
                zero, how = _complex_degree_zero(K, k, nnz_cap)
                table[str(k)] = how
                if not zero:
                    entry["status"] = "fails"
                    soft_fail = True
                    break
            report.homology_tables["complex"] = table
            if top < need:
                entry["unchecked_degrees"] = list(range(top + 1, need + 1))
            if need >= 1 and entry["status"] == "holds":
                report.pi1_status = _pi1(K).value
    report.thresholds.append(entry)

    # (ii) and (iv): for a face poset these posets are spheres of known dimension
    for k in range(0, D + 1):
        if K.count(k) == 0:
            break
        fk = f_of(k)
        bad = int((fk - 2 > k - 2).sum())
        e = {"condition": "ii", "object": f"below {k}-simplices", "required": "f(x)-2", "actual": k - 2,
             "status": "holds" if not bad else "fails", "violations": bad}
        if bad:
            hard_fail = True
        report.thresholds.append(e)
    if f_values is not None:
        bad, total = _interval_violations(K, f_values, D)
        report.thresholds.append({"condition": "iv", "object": "intervals", "required": "f(y)-f(x)-3",
                                  "status": "holds" if not bad else "fails", "violations": bad, "checked": total})
        hard_fail |= bool(bad)
    else:
        report.thresholds.append({"condition": "iv", "object": "intervals", "required": "f(y)-f(x)-3",
                                  "status": "holds", "reason": "automatic for f = dim"})

    # (iii) links of p-simplices are (n - 2 - f)-connected
    links = {}
    for p in range(0, D + 1):
        if K.count(p) == 0:
            break
        req = n - 2 - f_of(p)
        if (req < -1).all():
            continue
        top = D - p - 2
        e = {"condition": "iii", "object": f"links of {p}-simplices", "required_max": int(req.max()),
             "checked_through": min(int(req.max()), top), "status": "holds", "violations": 0}
        if top < -1:
            e["status"] = "unchecked"
            e["checked_through"] = None
            report.thresholds.append(e)
            continue
        viol = np.zeros(K.count(p), dtype=bool)
        summary = {}
        if (req >= -1).any():
            cof = K.cofacet_counts(p)
            viol |= (req >= -1) & (cof == 0)
            summary["-1"] = {"empty_links": int(((req >= -1) & (cof == 0)).sum())}
        if top >= 0 and (req >= 0).any():
            comp = link_component_counts(K, p)
            bad0 = (req >= 0) & (comp != 1)
            viol |= bad0
            summary["0"] = {"disconnected_links": int(bad0.sum()), "max_components": int(comp.max(initial=0))}
        for d in range(1, top + 1):
            sel = np.nonzero((req >= d) & ~viol)[0]
            if not len(sel):
                break
            nonzero = 0
            for idx in sel.tolist():
                L = K.link([K.vertices[i] for i in K.simplices(p)[idx]])
                H = reduced_homology(L, d, nnz_cap)
                if not H[d].is_trivial:
                    viol[idx] = True
                    nonzero += 1
            summary[str(d)] = {"nonvanishing_links": nonzero}
        e["violations"] = int(viol.sum())
        if viol.any():
            e["status"] = "fails"
            soft_fail = True
        unchecked = int(((req > top) & ~viol).sum())
        if unchecked:
            e["unchecked_simplices"] = unchecked
        links[str(p)] = summary
        report.thresholds.append(e)
    report.homology_tables["links"] = links

    if hard_fail:
        report.verdict = "counterexample"
    elif soft_fail:
        report.verdict = "inconclusive-truncation"
        report.notes.append("a threshold failed on the truncated complex; larger heights may restore it")
    return report


def _complex_degree_zero(K: SimplicialComplex, k: int, nnz_cap: int) -> tuple[bool, dict]:
    """Whether reduced ``H_k`` of the complex vanishes, with a record of how it was decided."""
    if k == 0:
        ncomp = K.components()[0]
        return ncomp == 1, {"group": "0" if ncomp == 1 else f"Z^{ncomp - 1}", "method": "components"}
    needed = sum((j + 1) * K.count(j) for j in range(2, k + 2))
    if needed <= nnz_cap:
        H = reduced_homology(K, k, nnz_cap)
        return H[k].is_trivial, {"group": str(H[k]), "method": "smith"}
    if k == 1:
        ok, _ = edge_path_certificate(K)
        if ok:
            return True, {"group": "0", "method": "edge-path certificate"}
    raise ResourceLimitError(f"degree {k} homology needs {needed} nonzeros, cap is {nnz_cap}")


def _pi1(K: SimplicialComplex) -> Pi1Status:
    ok, _ = edge_path_certificate(K)
    if ok:
        return Pi1Status.TRIVIAL
    if K.count(1) > 20_000:
        return Pi1Status.UNKNOWN
    return pi1_trivial(K.skeleton(2))


def _interval_violations(K: SimplicialComplex, f: Callable, D: int) -> tuple[int, int]:
    """Count pairs ``x < y`` of simplices with ``f(y) - f(x) > dim y - dim x``."""
    bad = total = 0
    fvals = {}
    for k in range(D + 1):
        for s in K.labelled(k):
            fvals[frozenset(s)] = (k, f(s))
    for k in range(1, D + 1):
        for s in K.labelled(k):
            ky, fy = fvals[frozenset(s)]
            for j in range(1, k + 1):
                for sub in combinations(s, j):
                    kx, fx = fvals[frozenset(sub)]
                    total += 1
                    if fy - fx - 3 > ky - kx - 3:
                        bad += 1
    return bad, total


# ------------------------------------------------------------------ cut bounds over simplices

def cut_bounds_check(data: ValidAlgebraicData, K: SimplicialComplex, max_p: int = 2) -> dict:
    """Genus of the cut along every simplex against the lower bounds ``g - (p+1)`` and ``g - p``.

    Also cross-validates, per simplex, that the minor-gcd unimodularity test
    agrees with the column-reduction one (whose kernel gives the cut) and
    that the kernel has rank ``rank - (p+1)``.
    """
    f = data.form
    g = genus(f)
    boundary_nonzero = not boundary_group(f).is_trivial
    X = np.array(K.vertices, dtype=np.int64).reshape(len(K.vertices), f.rank)
    out = {"genus": g, "boundary_nonzero": boundary_nonzero, "dims": {}}
    for p in range(0, min(max_p, K.dim) + 1):
        S = K.simplices(p)
        fails_weak = fails_strong = mismatch = 0
        low = None
        for s in range(0, len(S), _CHUNK // 4):
            block = X[S[s:s + _CHUNK // 4]]
            gen, uni = cut_genera_batch(f, block)
            mismatch += int((uni != batch_unimodular(block)).sum()) + int((~uni).sum())
            fails_weak += int((gen < g - (p + 1)).sum())
            if boundary_nonzero:
                fails_strong += int((gen < g - p).sum())
            m = int(gen.min()) if len(gen) else None
            low = m if low is None or (m is not None and m < low) else low
        out["dims"][str(p)] = {
            "simplices": int(len(S)),
            "min_cut_genus": low,
            "weak_bound_failures": fails_weak,
            "strong_bound_failures": fails_strong,
            "unimodularity_mismatches": mismatch,
        }
    return out
