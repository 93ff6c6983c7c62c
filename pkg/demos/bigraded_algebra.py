"""Hilbert series of free graded-commutative algebras and a small CDGA computation.

Run with ``python3 demos/bigraded_algebra.py``.
"""

from arcforms.graded_algebra import (
    FreeCdgaPresentation,
    Generator,
    cdga_homology,
    free_gca_series,
    quotient_by_slope_zero_generator,
    step0_single_generator,
    step0_two_generators,
    vanishing_line_check,
)

s0 = Generator("s0", 1, 0)
tau = Generator("[s0,s0]", 2, 2, parity=1)

S = free_gca_series([s0, tau], 8, 3)
print("Free algebra on s0 and its bracket:")
print(S.table())
Q = quotient_by_slope_zero_generator(S, s0)
print("\nAfter dividing out s0:")
print(Q.table())
print("support:", Q.support())

print("\nHomology of s1, rho with d(rho) = s1^2:")
H = cdga_homology(FreeCdgaPresentation((Generator("s1", 1, 0), Generator("rho", 2, 1)), {"rho": "s1^2"}), 6, 2)
print(H.table())

one = step0_single_generator(3, 8)
two = step0_two_generators(8)
print("\nsingle generator: on slope line =", one["on_slope_line"])
print("two generators: vanishing below d = g - 1:", two["vanishing_d_lt_g_minus_1"])
print("vanishing line check for the bracket alone:", vanishing_line_check(free_gca_series([tau], 8, 8), 1, -1))
