"""Exact computations for skew-symmetric forms, arc complexes, bigraded algebras and stability ranges."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundaryTrivialError,
    DimensionMismatchError,
    FlavorMismatchError,
    InjectivityError,
    NotUnimodularError,
    OutOfRangeError,
    ResourceLimitError,
    SkewFormError,
    TruncationOverflowError,
    UnsupportedCoefficientsError,
)
from .exact_linear import IntMatrix, smith_normal_form  # noqa: E402
from .skew_forms import SkewForm, CanonicalForm, canonical_decomposition, genus, max_order_delta, cut  # noqa: E402
from .complexes import SimplicialComplex, reduced_homology, join, pi1_trivial  # noqa: E402
from .arc_complex import CosetComplexSpec, ValidAlgebraicData, build_complex, verify_wcm, t_of_pair  # noqa: E402
from .graded_algebra import Generator, BigradedSeries, FreeCdgaPresentation, free_gca_series, cdga_homology  # noqa: E402
from .stability import StabilityQuery, theorem_a, theorem_b_dichotomy, stability_table  # noqa: E402
