"""Numerical verification of sharp homogeneous-expansion inequalities.

The library implements degree-4 jets of mappings of the unit polydisk, the
quasi-convexity and starlikeness operators, polarization norms of homogeneous
blocks, and one verifier per sharp coefficient inequality, together with the
closed-form extremal families that attain the bounds.
"""

__version__ = "0.1.0"

from .forms import (GridConfig, HomogeneousPoly, NormEstimate, SymmetricForm,
                    UnsupportedArityError, coefficient_row_max, form_sup_norm,
                    mixed_d2, polarization_ratio, polarize, poly_sup_norm)
from .inequalities import (ALPHA_STAR_MAX, BlaschkeSchwarz, CaratheodoryFunction,
                           CheckReport, HypothesisError, StructureError,
                           lemma38_analyze, lemma38_eval, schwarz_to_caratheodory,
                           verify_lemma21, verify_lemma22, verify_thm21,
                           verify_thm22_cor22, verify_thm23, verify_thm31,
                           verify_thm32, verify_thm33_cor33, verify_thm34,
                           verify_thm35)
from .jets import (MatrixSeries, ScalarSeries, VectorJet, apply_to_diagonal,
                   extract_homogeneous, jacobian, matrix_series_inverse,
                   series_add, series_mul)
from .kernels import BACKEND
from .mappings import (ClassCertificate, MappingFamily, MembershipConfig,
                       OneVarFamily, SupportingFunctional, g_quasi, g_star,
                       jet_of, lemma23_residual, lemma24_residual,
                       membership_test, supporting_apply)

__all__ = [
    "ALPHA_STAR_MAX", "BACKEND", "BlaschkeSchwarz", "CaratheodoryFunction",
    "CheckReport", "ClassCertificate", "GridConfig", "HomogeneousPoly",
    "HypothesisError", "MappingFamily", "MatrixSeries", "MembershipConfig",
    "NormEstimate", "OneVarFamily", "ScalarSeries", "StructureError",
    "SupportingFunctional", "SymmetricForm", "UnsupportedArityError",
    "VectorJet", "apply_to_diagonal", "coefficient_row_max",
    "extract_homogeneous", "form_sup_norm", "g_quasi", "g_star", "jacobian",
    "jet_of", "lemma23_residual", "lemma24_residual", "lemma38_analyze",
    "lemma38_eval", "matrix_series_inverse", "membership_test", "mixed_d2",
    "polarization_ratio", "polarize", "poly_sup_norm", "schwarz_to_caratheodory",
    "series_add", "series_mul", "supporting_apply", "verify_lemma21",
    "verify_lemma22", "verify_thm21", "verify_thm22_cor22", "verify_thm23",
    "verify_thm31", "verify_thm32", "verify_thm33_cor33", "verify_thm34",
    "verify_thm35",
]
