"""Print stability ranges for a few dimensions and coefficient rings.

Run with ``python3 demos/stability_tables.py``.
"""

from arcforms.stability import StabilityQuery, stability_table, table_markdown, theorem_a, theorem_b_dichotomy

for n, coeffs in [(3, "Z"), (5, "Z"), (5, "Q")]:
    print(table_markdown(stability_table(n, coeffs, 10)))

v = theorem_a(StabilityQuery(3, "Q", 8, 5))
print(f"n=3, Q, g=8, d=5: surjective {v.surjective}, isomorphism {v.isomorphism}")
print(f"  {v.citation}")

B = theorem_b_dichotomy(5)
print("\nn=5 dichotomy:")
print("  first branch at k=1,2,3:", [B.branch_i_bidegree(k) for k in (1, 2, 3)])
v = B.branch_ii(9, 4)
print(f"  second branch at (9,4): surjective {v.surjective}, isomorphism {v.isomorphism}")
