"""Sylvester-Hadamard construction and small-matrix utilities.

Matrices are dense ``int64`` numpy arrays. Sign matrices produced by
:func:`sylvester` are wrapped in :class:`SignMatrix`, which remembers the
Sylvester order it was generated from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import MatrixParseError, SizeLimitError

MAX_SYLVESTER_ORDER = 12
MAX_MATRIX_SIZE = 1 << MAX_SYLVESTER_ORDER


def as_int_matrix(a) -> np.ndarray:
    """Return ``a`` as a square 2-D ``int64`` array (0x0 allowed)."""
    if isinstance(a, SignMatrix):
        return a.entries
    arr = np.asarray(a)
    if arr.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.dtype.kind == "O":
        if not all(isinstance(x, (int, np.integer)) for x in arr.flat):
            raise ValueError("matrix entries must be integers")
        try:
            return np.array(arr.tolist(), dtype=np.int64)
        except OverflowError as exc:
            raise ValueError("matrix entries do not fit in 64 bits") from exc
    if arr.dtype.kind not in "iub":
        raise ValueError(f"matrix entries must be integers, got dtype {arr.dtype}")
    if arr.dtype.kind == "u" and arr.max() > np.iinfo(np.int64).max:
        raise ValueError("matrix entries do not fit in 64 bits")
    return arr.astype(np.int64)


def is_sign_matrix(a) -> bool:
    arr = as_int_matrix(a)
    return bool(np.all(np.abs(arr) == 1))


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """Square matrix with entries in {+1, -1}.

    ``order`` is the Sylvester order n when the matrix is H_n, else None.
    """

    entries: np.ndarray
    order: int | None = field(default=None)

    def __post_init__(self):
        arr = as_int_matrix(self.entries).copy()
        if not np.all(np.abs(arr) == 1):
            raise ValueError("sign matrix entries must be +1 or -1")
        if self.order is not None:
            if arr.shape[0] != 1 << self.order:
                raise ValueError(f"Sylvester order {self.order} needs size {1 << self.order}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def is_sylvester(self) -> bool:
        return self.order is not None

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        try:
            return np.array_equal(self.entries, as_int_matrix(other))
        except ValueError:
            return NotImplemented

    __hash__ = None

    def __repr__(self):
        origin = f"Sylvester({self.order})" if self.order is not None else "General"
        return f"SignMatrix(size={self.size}, origin={origin})"

    def tolist(self):
        return self.entries.tolist()


class MinorSpec(NamedTuple):
    """1-based (row, column) pair naming the minor S_{i,j}."""

    removed_row: int
    removed_col: int


def _check_order(n: int, max_order: int) -> None:
    if n < 0:
        raise ValueError(f"Sylvester order must be nonnegative, got {n}")
    if n > max_order:
        raise SizeLimitError(f"Sylvester order {n} exceeds the cap of {max_order}")


def _sylvester_bitwise(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    parity = (np.bitwise_count(idx[:, None] & idx[None, :]) & 1).astype(np.int64)
    return 1 - 2 * parity


def _sylvester_recursive(n: int) -> np.ndarray:
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        h = np.block([[h, h], [h, -h]])
    return h


def _sylvester_kronecker(n: int) -> np.ndarray:
    h1 = np.array([[1, 1], [1, -1]], dtype=np.int64)
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        h = kronecker(h, h1)
    return h


_CONSTRUCTIONS = {
    "bitwise": _sylvester_bitwise,
    "recursive": _sylvester_recursive,
    "kronecker": _sylvester_kronecker,
}


def sylvester(n: int, method: str = "bitwise", max_order: int = MAX_SYLVESTER_ORDER) -> SignMatrix:
    """Sylvester-Hadamard matrix H_n of size 2**n.

    ``method`` selects the construction: ``"bitwise"`` uses
    ``(-1)**popcount(a & c)``, ``"recursive"`` the block doubling
    ``[[H, H], [H, -H]]`` and ``"kronecker"`` the n-fold Kronecker power of H_1.
    All three give the same matrix.
    """
    _check_order(n, max_order)
    try:
        build = _CONSTRUCTIONS[method]
    except KeyError:
        raise ValueError(f"unknown construction {method!r}") from None
    return SignMatrix(build(n), order=n)


def sylvester_constructions(n: int, max_order: int = MAX_SYLVESTER_ORDER) -> dict[str, np.ndarray]:
    _check_order(n, max_order)
    return {name: build(n) for name, build in _CONSTRUCTIONS.items()}


def kronecker(a, b, max_size: int = MAX_MATRIX_SIZE) -> np.ndarray:
    a = as_int_matrix(a)
    b = as_int_matrix(b)
    size = a.shape[0] * b.shape[0]
    if size > max_size:
        raise SizeLimitError(f"Kronecker product of size {size} exceeds the cap of {max_size}")
    return np.kron(a, b)


def minor(a, spec: MinorSpec | tuple[int, int]):
    """Delete row ``i`` and column ``j`` (both 1-based).

    A :class:`SignMatrix` input gives a general :class:`SignMatrix` back.
    """
    i, j = spec
    arr = as_int_matrix(a)
    m = arr.shape[0]
    if m < 1:
        raise ValueError("cannot take a minor of the empty matrix")
    if not (1 <= i <= m and 1 <= j <= m):
        raise IndexError(f"minor indices ({i}, {j}) out of range for size {m}")
    out = np.delete(np.delete(arr, i - 1, axis=0), j - 1, axis=1)
    if isinstance(a, SignMatrix):
        return SignMatrix(out)
    return out


def row_product(a: SignMatrix, k: int) -> SignMatrix:
    """Multiply every row elementwise by row ``k`` (0-based)."""
    arr = as_int_matrix(a)
    if not 0 <= k < arr.shape[0]:
        raise IndexError(f"row {k} out of range for size {arr.shape[0]}")
    return SignMatrix(arr * arr[k])


def is_hadamard(a) -> bool:
    arr = as_int_matrix(a)
    m = arr.shape[0]
    if not np.all(np.abs(arr) == 1):
        return False
    # |entry of A A^T| <= m <= 4096, no overflow in int64
    return bool(np.array_equal(arr @ arr.T, m * np.eye(m, dtype=np.int64)))


@dataclass(frozen=True)
class LineStat:
    sum: int
    product: int


def line_stats(a) -> tuple[list[LineStat], list[LineStat]]:
    """Exact (row stats, column stats) for a sign matrix."""
    arr = as_int_matrix(a)

    def stats(lines):
        # product of +-1 entries is the parity of the count of -1s
        return [
            LineStat(int(line.sum()), -1 if int(np.count_nonzero(line < 0)) % 2 else 1)
            for line in lines
        ]

    if not np.all(np.abs(arr) == 1):
        raise ValueError("line_stats expects a sign matrix")
    return stats(arr), stats(arr.T)


def format_matrix(a) -> str:
    arr = as_int_matrix(a)
    lines = [str(arr.shape[0])]
    lines.extend(" ".join(str(int(x)) for x in row) for row in arr)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, sign: bool = False):
    """Parse the matrix text format.

    Line 1 holds the size m; each of the next m lines holds m integers.
    Blank lines after the last row are ignored. With ``sign=True`` every
    entry must be +1 or -1 and a :class:`SignMatrix` is returned.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixParseError("empty input, expected the matrix size on line 1", line=1)
    header = lines[0].split()
    if len(header) != 1:
        raise MatrixParseError("line 1 must contain exactly the matrix size", line=1)
    m = _parse_int(header[0], 1)
    if m < 0:
        raise MatrixParseError("matrix size must be nonnegative", line=1, token=header[0])
    if m > MAX_MATRIX_SIZE:
        raise MatrixParseError(f"matrix size exceeds the cap of {MAX_MATRIX_SIZE}", line=1, token=header[0])
    if len(lines) - 1 != m:
        line = m + 2 if len(lines) - 1 > m else len(lines) + 1
        raise MatrixParseError(f"expected {m} matrix rows, found {len(lines) - 1}", line=line)

    rows = []
    for r, line in enumerate(lines[1:], start=1):
        tokens = line.split()
        lineno = r + 1
        if len(tokens) != m:
            raise MatrixParseError(f"row {r} has {len(tokens)} entries, expected {m}", line=lineno)
        row = []
        for tok in tokens:
            value = _parse_int(tok, lineno)
            if sign and value not in (1, -1):
                raise MatrixParseError("entry must be +1 or -1", line=lineno, token=tok)
            if not -(1 << 63) <= value < (1 << 63):
                raise MatrixParseError("entry does not fit in 64 bits", line=lineno, token=tok)
            row.append(value)
        rows.append(row)

    arr = np.array(rows, dtype=np.int64).reshape(m, m)
    return SignMatrix(arr) if sign else arr


def _parse_int(token: str, line: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise MatrixParseError("not an integer", line=line, token=token) from None
