"""Build small truncated arc complexes and check the connectivity conditions.

Run with ``python3 demos/arc_complex_tour.py``.  The largest case here takes
a few seconds.
"""

import time

from arcforms.arc_complex import ValidAlgebraicData, build_complex, cut_bounds_check, t_of_pair, verify_wcm
from arcforms.complexes import reduced_homology
from arcforms.skew_forms import SkewForm

cases = [
    ("H", SkewForm.hyperbolic(1), 2),
    ("H + Z", SkewForm.hyperbolic(1) + SkewForm.zero(1), 2),
    ("T(2) + H", SkewForm.torsion(2) + SkewForm.hyperbolic(1), 1),
    ("H^2", SkewForm.hyperbolic(2), 1),
]

for name, form, B in cases:
    t0 = time.time()
    data = ValidAlgebraicData.from_form(form)
    spec = data.coset_spec(B, 2)
    K = build_complex(spec)
    report = verify_wcm(spec, complex=K)
    t = t_of_pair(form.rank, form.gram)
    print(f"{name}: t = {t}, height {B}, f-vector {K.f_vector()}")
    print(f"  delta = {data.delta.representative}, verdict {report.verdict}")
    for e in report.thresholds:
        print(f"  condition {e['condition']:<3} {e['object']:<24} {e['status']}")
    H = reduced_homology(K, 1)
    print(f"  reduced H0 = {H[0]}, H1 = {H[1]}")
    cb = cut_bounds_check(data, K)
    low = {p: v["min_cut_genus"] for p, v in cb["dims"].items()}
    print(f"  genus {cb['genus']}, smallest cut genus per simplex dimension {low}")
    print(f"  ({time.time() - t0:.1f}s)")
    print()
