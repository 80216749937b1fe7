"""Spectral sparsification of simplicial complexes by resistance sampling."""

from .complex import SimplicialComplex, assemble_complex
from .errors import NumericFailure, ScsparseError, SizeGuard, ValidationError
from .exact import ger_pinv, ger_svd
from .kid import KidConfig, kid_resistance, kid_run
from .metrics import eps_close_check, spectral_distance
from .sparsify import ProbabilityMeasure, SparsifyConfig, default_q, measure_from_ger, sample_sparsifier

__all__ = [
    "SimplicialComplex", "assemble_complex",
    "ScsparseError", "ValidationError", "SizeGuard", "NumericFailure",
    "ger_svd", "ger_pinv", "KidConfig", "kid_run", "kid_resistance",
    "spectral_distance", "eps_close_check",
    "ProbabilityMeasure", "SparsifyConfig", "default_q", "measure_from_ger", "sample_sparsifier",
]
