"""Finite-level tools for sofic approximations: permutations and pieces,
square-root counts, near-commuting permutations, cycle-pair expanders,
intertwiner extraction, interval translation maps and sofic representations.
"""
from .kernels import BACKEND
from .perm import (
    DiagProjection,
    PartialPermutation,
    Permutation,
    canonical_cycle,
    hamming_perm,
    tensor_identity,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DiagProjection",
    "PartialPermutation",
    "Permutation",
    "canonical_cycle",
    "hamming_perm",
    "tensor_identity",
    "__version__",
]
