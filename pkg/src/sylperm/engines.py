"""Exact permanent engines.

Every engine returns a Python ``int`` and agrees with every other engine on
any input inside its size cap. The permanent of the 0x0 matrix is 1.
"""

from __future__ import annotations

import enum
import itertools
import math

import numpy as np

from . import _kernels
from .errors import ConsistencyError, SizeLimitError
from .matrix import MinorSpec, as_int_matrix, is_sign_matrix, minor, sylvester

NAIVE_MAX_SIZE = 10
LAPLACE_MAX_SIZE = 12
GRAY_MAX_SIZE = 34
EXPANSION_MAX_SIZE = 8
SYLVESTER_FAST_ORDERS = (2, 5)

# below this size the pure-Python walk beats kernel dispatch overhead
NATIVE_MIN_SIZE = 10


class Engine(str, enum.Enum):
    NAIVE = "naive"
    LAPLACE = "laplace"
    RYSER = "ryser"
    GLYNN = "glynn"
    SUM_EXPANSION = "sum-expansion"
    SYLVESTER_FAST = "sylvester-fast"

    def __str__(self):
        return self.value


def _check_size(m: int, cap: int, engine: str) -> None:
    if m > cap:
        raise SizeLimitError(f"{engine} engine is capped at size {cap}, got {m}")


def per_naive(a, max_size: int = NAIVE_MAX_SIZE) -> int:
    """Sum over all m! permutations. Ground truth for everything else."""
    arr = as_int_matrix(a)
    m = arr.shape[0]
    _check_size(m, max_size, "naive")
    rows = arr.tolist()
    total = 0
    for sigma in itertools.permutations(range(m)):
        term = 1
        for i, j in enumerate(sigma):
            term *= rows[i][j]
            if not term:
                break
        total += term
    return total


def per_laplace(a, col: int = 1, max_size: int = LAPLACE_MAX_SIZE) -> int:
    """Laplace expansion along column ``col`` (1-based).

    Minors are expanded recursively along their leftmost remaining column;
    a sub-permanent depends only on which rows remain, so those are memoized
    by row bitmask.
    """
    arr = as_int_matrix(a)
    m = arr.shape[0]
    _check_size(m, max_size, "laplace")
    if m == 0:
        return 1
    if not 1 <= col <= m:
        raise IndexError(f"column {col} out of range for size {m}")
    rows = arr.tolist()
    c0 = col - 1
    rest = [c for c in range(m) if c != c0]
    memo = {0: 1}

    def sub(mask: int) -> int:
        # permanent of rows in mask against the last popcount(mask) columns of rest
        if mask in memo:
            return memo[mask]
        c = rest[len(rest) - mask.bit_count()]
        total = 0
        bits = mask
        while bits:
            low = bits & -bits
            k = low.bit_length() - 1
            bits ^= low
            if rows[k][c]:
                total += rows[k][c] * sub(mask ^ low)
        memo[mask] = total
        return total

    full = (1 << m) - 1
    return sum(rows[k][c0] * sub(full ^ (1 << k)) for k in range(m) if rows[k][c0])


def _row_bound(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return int(max(sum(abs(int(x)) for x in row) for row in arr))


def _gray_sum(base, deltas, bound: int, backend: str, workers: int | None, size: int) -> int:
    if backend == "auto":
        native = size >= NATIVE_MIN_SIZE and _kernels.native_supported(bound)
    elif backend == "native":
        native = True
    elif backend == "python":
        native = False
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if native:
        return _kernels.gray_sum_native(base, deltas, bound, workers)
    return _kernels.gray_sum_python(base, deltas)


def per_ryser(a, workers: int | None = None, backend: str = "auto", max_size: int = GRAY_MAX_SIZE) -> int:
    """Ryser inclusion-exclusion over column subsets, 2**m Gray-code steps.

    Per(A) = (-1)**m * sum_S (-1)**|S| * prod_i sum_{j in S} a_ij.
    ``workers`` splits the subset range into contiguous blocks; the result
    does not depend on it.
    """
    arr = as_int_matrix(a)
    m = arr.shape[0]
    _check_size(m, max_size, "ryser")
    if m == 0:
        return 1
    base = np.zeros(m, dtype=np.int64)
    deltas = np.ascontiguousarray(arr.T)
    total = _gray_sum(base, deltas, _row_bound(arr), backend, workers, m)
    return -total if m % 2 else total


def per_glynn(a, workers: int | None = None, backend: str = "auto", max_size: int = GRAY_MAX_SIZE) -> int:
    """Glynn's formula over sign vectors with the first sign fixed to +1.

    Per(A) = 2**-(m-1) * sum_d (prod_k d_k) * prod_i sum_j d_j a_ij,
    2**(m-1) Gray-code steps. The final division must be exact.
    """
    arr = as_int_matrix(a)
    m = arr.shape[0]
    _check_size(m, max_size, "glynn")
    if m == 0:
        return 1
    base = arr.sum(axis=1)
    # flipping d_j from +1 to -1 subtracts twice column j
    deltas = np.ascontiguousarray(-2 * arr[:, 1:].T)
    total = _gray_sum(base, deltas, _row_bound(arr), backend, workers, m)
    q, rem = divmod(total, 1 << (m - 1))
    if rem:
        raise ConsistencyError(f"Glynn sum {total} is not divisible by 2**{m - 1}")
    return q


def p_k_sum(b, k: int, max_size: int = EXPANSION_MAX_SIZE) -> int:
    """Sum of the permanents of all k x k submatrices of ``b``."""
    arr = as_int_matrix(b)
    m = arr.shape[0]
    _check_size(m, max_size, "p_k")
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, {m}], got {k}")
    if k == 0:
        return 1
    total = 0
    for rows in itertools.combinations(range(m), k):
        sub_rows = arr[list(rows)]
        for cols in itertools.combinations(range(m), k):
            total += per_ryser(sub_rows[:, list(cols)], backend="python")
    return total


def split_ones(a) -> np.ndarray:
    """The (0,1)-matrix B with A = J - 2B, for a sign matrix A."""
    arr = as_int_matrix(a)
    if not is_sign_matrix(arr):
        raise ValueError("expected a matrix with entries +1 and -1")
    b = (1 - arr) // 2
    assert np.all((b == 0) | (b == 1))
    return b


def expansion_terms(a, max_size: int = EXPANSION_MAX_SIZE) -> list[int]:
    """Signed terms of Per(J - 2B) indexed by the factorial argument.

    ``terms[k] = (-1)**(m-k) * 2**(m-k) * k! * p_{m-k}(B)``; their sum is Per(A).
    """
    b = split_ones(a)
    m = b.shape[0]
    _check_size(m, max_size, "sum-expansion")
    terms = []
    for k in range(m + 1):
        j = m - k
        sign = -1 if j % 2 else 1
        terms.append(sign * (1 << j) * math.factorial(k) * p_k_sum(b, j, max_size=max_size))
    return terms


def per_sum_expansion(a, max_size: int = EXPANSION_MAX_SIZE) -> int:
    """Permanent of a sign matrix via Per(J - 2B) = sum_k (-2)**k (m-k)! p_k(B)."""
    return sum(expansion_terms(a, max_size=max_size))


def sylvester_minor(n: int):
    """H_n with its first row and column removed."""
    return minor(sylvester(n), MinorSpec(1, 1))


def per_sylvester_fast(n: int, workers: int | None = None, backend: str = "auto") -> int:
    """Per(H_n) as 2**n times the permanent of its (1,1) minor."""
    lo, hi = SYLVESTER_FAST_ORDERS
    if not lo <= n <= hi:
        raise ValueError(f"sylvester-fast needs {lo} <= n <= {hi}, got {n}")
    return (1 << n) * per_ryser(sylvester_minor(n), workers=workers, backend=backend)


_CAPS = {
    Engine.NAIVE: NAIVE_MAX_SIZE,
    Engine.LAPLACE: LAPLACE_MAX_SIZE,
    Engine.RYSER: GRAY_MAX_SIZE,
    Engine.GLYNN: GRAY_MAX_SIZE,
    Engine.SUM_EXPANSION: EXPANSION_MAX_SIZE,
}


def engine_supports(engine: Engine | str, a) -> bool:
    """Whether ``engine`` can run on ``a`` without hitting a cap or type restriction."""
    engine = Engine(engine)
    arr = as_int_matrix(a)
    if engine is Engine.SYLVESTER_FAST:
        order = getattr(a, "order", None)
        return order is not None and SYLVESTER_FAST_ORDERS[0] <= order <= SYLVESTER_FAST_ORDERS[1]
    if arr.shape[0] > _CAPS[engine]:
        return False
    if engine is Engine.SUM_EXPANSION:
        return is_sign_matrix(arr)
    return True


def permanent(a, engine: Engine | str = Engine.RYSER, workers: int | None = None) -> int:
    """Dispatch to one engine by name."""
    engine = Engine(engine)
    if engine is Engine.NAIVE:
        return per_naive(a)
    if engine is Engine.LAPLACE:
        return per_laplace(a)
    if engine is Engine.RYSER:
        return per_ryser(a, workers=workers)
    if engine is Engine.GLYNN:
        return per_glynn(a, workers=workers)
    if engine is Engine.SUM_EXPANSION:
        return per_sum_expansion(a)
    order = getattr(a, "order", None)
    if order is None:
        raise ValueError("sylvester-fast needs a matrix built by sylvester(n)")
    return per_sylvester_fast(order, workers=workers)
