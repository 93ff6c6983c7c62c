import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_skew_form, random_unimodular
from oracles import democratic_arf, minor_gcd, naive_invariant_factors

from arcforms.errors import BoundaryTrivialError, DimensionMismatchError, NotUnimodularError, SkewFormError
from arcforms.exact_linear import AbelianInvariants, as_matrix
from arcforms.skew_forms import (
    BoundaryQuotient,
    CanonicalForm,
    QuadraticRefinement,
    SkewForm,
    arf_invariant,
    boundary_group,
    canonical_basis,
    canonical_decomposition,
    cut,
    cut_genera_batch,
    genus,
    max_order_delta,
    orthogonal_sum,
    r_invariant,
    refinement_from_basis,
    t_invariant,
)

H = SkewForm.hyperbolic(1)
T2 = SkewForm.torsion(2)
Z1 = SkewForm.zero(1)


def test_skew_validation():
    with pytest.raises(SkewFormError):
        SkewForm.from_rows([[0, 1], [1, 0]])
    with pytest.raises(SkewFormError):
        SkewForm.from_rows([[1, 0], [0, 0]])
    with pytest.raises(SkewFormError):
        SkewForm.from_rows([[0, 1, 0], [-1, 0, 0]])


def test_canonical_examples():
    assert canonical_decomposition(H) == CanonicalForm(1, (), 0)
    assert canonical_decomposition(SkewForm.zero(3)) == CanonicalForm(0, (), 3)
    assert canonical_decomposition(T2) == CanonicalForm(0, (2,), 0)


def test_invariant_examples():
    h2 = SkewForm.hyperbolic(2)
    assert (genus(h2), t_invariant(h2)) == (2, 4)
    assert (genus(T2), r_invariant(T2), t_invariant(T2)) == (0, 1, 0)
    f = H + Z1
    assert genus(f) == 1 and boundary_group(f).free_rank == 1 and r_invariant(f) == 0
    assert 2 * genus(f) == f.rank - boundary_group(f).free_rank - 2 * r_invariant(f)


def test_boundary_examples():
    assert boundary_group(H).is_trivial
    assert boundary_group(SkewForm.zero(2)) == AbelianInvariants((), 2)
    assert boundary_group(T2) == AbelianInvariants((2, 2), 0)


def test_max_order_delta_examples():
    d = max_order_delta(H + Z1)
    assert d.order == math.inf
    d = max_order_delta(T2)
    assert d.order == 2 and d.representative == (0, -1)
    assert max_order_delta(T2 + Z1).order == math.inf
    with pytest.raises(BoundaryTrivialError):
        max_order_delta(H)


def test_max_order_delta_generates_summand():
    rng = random.Random(41)
    for _ in range(100):
        f = random_skew_form(rng, rng.randint(2, 6), bound=6)
        if boundary_group(f).is_trivial:
            continue
        d = max_order_delta(f)
        q = BoundaryQuotient(f)
        assert q.generates_max_order_summand(d.representative)
        assert q.normal_form(d.representative) == d.representative
        grp = boundary_group(f)
        assert d.order == (math.inf if grp.free_rank else grp.exponent)


def test_normal_form_is_class_invariant():
    rng = random.Random(43)
    f = SkewForm.torsion(6) + SkewForm.torsion(2) + Z1
    q = BoundaryQuotient(f)
    for _ in range(200):
        x = [rng.randint(-9, 9) for _ in range(f.rank)]
        c = [rng.randint(-3, 3) for _ in range(f.rank)]
        y = [a + b for a, b in zip(x, f.gram.apply(c))]
        assert q.same_class(x, y)
        assert q.normal_form(x) == q.normal_form(y)


def test_cut_examples():
    c = cut(SkewForm.hyperbolic(2), [(1, 0, 0, 0)])
    assert c.rank == 3 and genus(c) == 1
    c = cut(H, [(1, 0)])
    assert c.rank == 1 and c.gram.is_zero()
    f = H + Z1
    alpha = (0, 0, 1)
    assert BoundaryQuotient(f).generates_max_order_summand(alpha)
    assert genus(cut(f, [alpha])) == 1


def test_cut_errors():
    with pytest.raises(NotUnimodularError):
        cut(H, [(2, 0)])
    with pytest.raises(NotUnimodularError):
        cut(SkewForm.hyperbolic(2), [(1, 0, 0, 0), (1, 0, 0, 0)])
    with pytest.raises(DimensionMismatchError):
        cut(H, [(1, 0, 0)])


def test_cut_drops_rank_by_p_plus_one():
    rng = random.Random(47)
    f = SkewForm.hyperbolic(2) + T2
    done = 0
    while done < 60:
        k = rng.randint(1, 3)
        alphas = [tuple(rng.randint(-2, 2) for _ in range(f.rank)) for _ in range(k)]
        if minor_gcd(alphas) != 1:
            continue
        c = cut(f, alphas)
        assert c.rank == f.rank - k
        done += 1


def test_cut_genera_batch_matches_scalar():
    rng = np.random.default_rng(53)
    f = SkewForm.hyperbolic(2) + T2
    A = rng.integers(-2, 3, size=(400, 2, f.rank))
    gen, uni = cut_genera_batch(f, A)
    for a, g, u in zip(A, gen, uni):
        rows = a.tolist()
        ok = minor_gcd(rows) == 1
        assert bool(u) == ok
        if ok:
            assert g == genus(cut(f, rows))
        else:
            assert g == -1


def test_canonical_basis_witness():
    rng = random.Random(59)
    for _ in range(200):
        f = random_skew_form(rng, rng.randint(1, 7), bound=7)
        P, c = canonical_basis(f)
        assert f.congruent(P).gram == c.to_form().gram
        assert c == canonical_decomposition(f)


def test_canonical_agrees_with_naive_snf():
    rng = random.Random(61)
    for _ in range(200):
        f = random_skew_form(rng, rng.randint(1, 6))
        factors = naive_invariant_factors(f.gram.to_lists())
        c = canonical_decomposition(f)
        assert c.genus == sum(1 for d in factors if d == 1) // 2
        assert list(c.torsion_pairs) == [d for d in factors if d > 1][::2]
        assert c.zero_rank == f.rank - len(factors)


def test_genus_additive_random_pairs():
    # Stated as a general property; it fails whenever the torsion of the two
    # boundaries interacts, see test_coprime_torsion_creates_genus.
    rng = random.Random(79)
    bad = []
    for _ in range(200):
        a = random_skew_form(rng, rng.randint(1, 6), 5)
        b = random_skew_form(rng, rng.randint(1, 6), 5)
        if genus(orthogonal_sum(a, b)) != genus(a) + genus(b):
            bad.append((a.gram.to_lists(), b.gram.to_lists()))
    assert not bad, f"{len(bad)} of 200 pairs are not additive, first {bad[0]}"


def test_coprime_torsion_creates_genus():
    f = SkewForm.torsion(3) + SkewForm.torsion(4)
    assert genus(SkewForm.torsion(3)) == genus(SkewForm.torsion(4)) == 0
    assert canonical_decomposition(f) == CanonicalForm(1, (12,), 0)
    # an explicit hyperbolic pair: lambda(e1 + e3, -f1 + f3) = -3 + 4
    x, y = (1, 0, 1, 0), (0, -1, 0, 1)
    assert f(x, y) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 6), st.integers(1, 6))
def test_genus_superadditive(seed, n1, n2):
    rng = random.Random(seed)
    a, b = random_skew_form(rng, n1, 5), random_skew_form(rng, n2, 5)
    assert genus(orthogonal_sum(a, b)) >= genus(a) + genus(b)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 3), st.integers(1, 6))
def test_genus_additive_with_unimodular_summand(seed, g, n):
    rng = random.Random(seed)
    b = random_skew_form(rng, n, 5)
    assert genus(SkewForm.hyperbolic(g) + b) == g + genus(b)


def test_orthogonal_sum_examples():
    assert genus(H + H) == 2
    c = canonical_decomposition(T2 + H)
    assert c.genus == 1 and c.torsion_pairs == (2,)
    f = random_skew_form(random.Random(1), 5)
    assert canonical_decomposition(f + SkewForm.zero(0)) == canonical_decomposition(f)


def test_congruence_invariance_short():
    rng = random.Random(67)
    for _ in range(50):
        f = random_skew_form(rng, rng.randint(1, 8))
        c = canonical_decomposition(f)
        for _ in range(5):
            assert canonical_decomposition(f.congruent(random_unimodular(rng, f.rank))) == c


# ------------------------------------------------------------------ Arf

def test_arf_examples():
    assert arf_invariant(QuadraticRefinement.hyperbolic([0, 0, 0, 0])) == 0
    assert arf_invariant(QuadraticRefinement.hyperbolic([1, 1, 0, 0])) == 1
    assert arf_invariant(QuadraticRefinement.hyperbolic([1, 1, 1, 1])) == 0


def test_arf_matches_democratic_oracle():
    for g in range(1, 4):
        base = SkewForm.hyperbolic(g)
        for vals in itertools.product((0, 1), repeat=2 * g):
            q = QuadraticRefinement.hyperbolic(vals)
            assert arf_invariant(q) == democratic_arf(base.gram.to_lists(), vals)


def test_refinement_extension_rule():
    q = QuadraticRefinement.hyperbolic([1, 0, 1, 1])
    rng = random.Random(71)
    for _ in range(100):
        x = [rng.randint(-3, 3) for _ in range(4)]
        y = [rng.randint(-3, 3) for _ in range(4)]
        s = [a + b for a, b in zip(x, y)]
        assert q(s) == (q(x) + q(y) + q.base(x, y)) % 2


def test_refinement_from_general_basis():
    rng = random.Random(73)
    for _ in range(60):
        g = rng.randint(1, 3)
        P = random_unimodular(rng, 2 * g)
        f = SkewForm.hyperbolic(g).congruent(P)
        vals = [rng.randint(0, 1) for _ in range(2 * g)]
        q = refinement_from_basis(f, vals)
        assert arf_invariant(q) == democratic_arf(f.gram.to_lists(), vals)


def test_refinement_requires_unimodular():
    with pytest.raises(SkewFormError):
        refinement_from_basis(T2, [0, 0])
    with pytest.raises(SkewFormError):
        QuadraticRefinement(T2, (0, 0))


def test_json_round_trips():
    f = SkewForm.hyperbolic(1) + T2
    assert SkewForm.from_json(f.to_json()) == f
    assert SkewForm.from_json({"gram": [[0, 3], [-3, 0]]}) == SkewForm.torsion(3)
    c = canonical_decomposition(f)
    assert CanonicalForm.from_json(c.to_json()) == c
    q = QuadraticRefinement.hyperbolic([1, 1])
    assert QuadraticRefinement.from_json(q.to_json()) == q
    assert max_order_delta(T2).to_json()["order"] == 2
    assert max_order_delta(H + Z1).to_json()["order"] == "inf"


def test_canonical_table_is_aligned():
    lines = canonical_decomposition(SkewForm.hyperbolic(2) + T2).table().splitlines()
    starts = {len(ln) - len(ln[len(ln.split("  ")[0]):].lstrip()) for ln in lines}
    assert len(starts) == 1


def test_congruent_by_matrix_type():
    P = as_matrix([[1, 1], [0, 1]])
    assert H.congruent(P) == H
