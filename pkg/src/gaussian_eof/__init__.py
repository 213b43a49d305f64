"""Entanglement of formation of two-mode Gaussian states."""
from .gaussian_core import (
    StandardFormParams,
    ScalingFactors,
    reduce_to_standard_form,
    symplectic_spectrum,
    validate_physical,
    classify_separability,
)
from .solver import OptimalDecomposition, TmsvsParams, entropy_of_formation, solve_eof
from .decomposition import certify, certify_solution

__version__ = "0.1.0"

__all__ = [
    "StandardFormParams",
    "ScalingFactors",
    "reduce_to_standard_form",
    "symplectic_spectrum",
    "validate_physical",
    "classify_separability",
    "OptimalDecomposition",
    "TmsvsParams",
    "entropy_of_formation",
    "solve_eof",
    "certify",
    "certify_solution",
]
