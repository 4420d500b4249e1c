"""Exact matrix permanents and a checker for nu2(Per(H_n)) = 2**n - 1."""

from .engines import (
    Engine,
    expansion_terms,
    p_k_sum,
    per_glynn,
    per_laplace,
    per_naive,
    per_ryser,
    per_sum_expansion,
    per_sylvester_fast,
    permanent,
)
from .errors import ConsistencyError, MatrixParseError, SizeLimitError
from .matrix import (
    MinorSpec,
    SignMatrix,
    format_matrix,
    is_hadamard,
    kronecker,
    line_stats,
    minor,
    parse_matrix,
    row_product,
    sylvester,
)
from .valuation import INF, digit_sum_base2, nu2, nu2_factorial

__all__ = [
    "ConsistencyError",
    "Engine",
    "INF",
    "MatrixParseError",
    "MinorSpec",
    "SignMatrix",
    "SizeLimitError",
    "digit_sum_base2",
    "expansion_terms",
    "format_matrix",
    "is_hadamard",
    "kronecker",
    "line_stats",
    "minor",
    "nu2",
    "nu2_factorial",
    "p_k_sum",
    "parse_matrix",
    "per_glynn",
    "per_laplace",
    "per_naive",
    "per_ryser",
    "per_sum_expansion",
    "per_sylvester_fast",
    "permanent",
    "row_product",
    "sylvester",
]
