"""Interlacing families of polynomials at desk scale.

Mixed characteristic polynomials, real-stable polynomial tools, barrier
traces, and the partition and paving constructions built on them.
"""

from .errors import InterlacingError, IterationFailure, PreconditionError
from .hermitian import char_poly, dilation, eigenvalues, gram_vectors, operator_norm, rank1
from .mixedchar import (
    RandomVectorSpec,
    brute_force_expected_charpoly,
    covariance,
    mixed_charpoly,
    mixed_discriminant,
    tree_polynomial,
)
from .solver import (
    greedy_assign,
    partition_r,
    pave,
    paving_r_bound,
    verify_interlacing_tree,
    weaver_partition,
)
from .upoly import RealPoly, is_real_rooted, max_imag_ratio, max_root, roots

__all__ = [
    "InterlacingError",
    "IterationFailure",
    "PreconditionError",
    "RandomVectorSpec",
    "RealPoly",
    "brute_force_expected_charpoly",
    "char_poly",
    "covariance",
    "dilation",
    "eigenvalues",
    "gram_vectors",
    "greedy_assign",
    "is_real_rooted",
    "max_imag_ratio",
    "max_root",
    "mixed_charpoly",
    "mixed_discriminant",
    "operator_norm",
    "partition_r",
    "pave",
    "paving_r_bound",
    "rank1",
    "roots",
    "tree_polynomial",
    "verify_interlacing_tree",
    "weaver_partition",
]
