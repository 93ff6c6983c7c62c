"""Classify a few integral skew forms and watch genus behave under direct sums.

Run with ``python3 demos/forms_and_genus.py``.
"""

from arcforms.skew_forms import (
    BoundaryQuotient,
    SkewForm,
    boundary_group,
    canonical_basis,
    canonical_decomposition,
    cut,
    genus,
    max_order_delta,
)

H = SkewForm.hyperbolic(1)

print("Canonical forms")
for name, f in [("H", H), ("T(2)", SkewForm.torsion(2)), ("H + Z", H + SkewForm.zero(1)),
                ("H + T(6) + T(2)", H + SkewForm.torsion(6) + SkewForm.torsion(2))]:
    c = canonical_decomposition(f)
    print(f"  {name:18s} -> {c}, boundary {boundary_group(f)}")

# T(3) and T(4) have genus 0 each, but 3 and 4 are coprime, so the sum
# contains a unimodular hyperbolic pair.
a, b = SkewForm.torsion(3), SkewForm.torsion(4)
f = a + b
print()
print(f"genus T(3) = {genus(a)}, genus T(4) = {genus(b)}, genus T(3)+T(4) = {genus(f)}")
P, c = canonical_basis(f)
print(f"  canonical form {c}; change of basis columns:")
for row in P.to_lists():
    print("   ", row)

print()
print("Cutting along a boundary element of maximal order")
g = H + SkewForm.torsion(2) + SkewForm.zero(1)
d = max_order_delta(g)
print(f"  form {canonical_decomposition(g)}, delta = {d.representative}, order {d.order}")
q = BoundaryQuotient(g)
for alpha in [(0, 0, 0, 0, 1), (1, 0, 0, 0, 1), (0, 0, 1, 0, 1)]:
    if not q.generates_max_order_summand(alpha):
        continue
    k = cut(g, [alpha])
    print(f"  alpha = {alpha}: cut has rank {k.rank} and genus {genus(k)} (before: {genus(g)})")
