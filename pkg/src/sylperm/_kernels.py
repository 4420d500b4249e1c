"""Gray-code product-sum kernels shared by the Ryser and Glynn engines.

Both formulas have the shape

    sum over g in {0,1}^k of (-1)^popcount(g) * prod_i r_i(g),
    r(g) = base + sum_{j : g_j = 1} deltas[j]

and differ only in ``base`` and ``deltas``. Walking g in Gray-code order
changes one bit per step, so r is updated with a single vector add.

The native path keeps each product exactly as base-2**30 limbs held in
int64: factors are first multiplied in groups whose product is below 2**30,
then folded into the limb vector. Block accumulators add one limb per term
without carrying; blocks are capped at 2**30 terms so a limb never exceeds
2**60 in magnitude.
"""

from __future__ import annotations

import os

import numba as nb
import numpy as np

LIMB_BITS = 30
_MASK = (1 << LIMB_BITS) - 1
MAX_BLOCK_TERMS = 1 << 30

# installed TBB builds are often too old for numba; try OpenMP first
nb.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@nb.njit(cache=True, nogil=True)
def _block_sum(base, deltas, start, stop, group, nlimbs):
    k, m = deltas.shape
    r = base.copy()
    g = start ^ (start >> 1)
    parity = 0
    for j in range(k):
        if (g >> j) & 1:
            parity ^= 1
            for i in range(m):
                r[i] += deltas[j, i]

    acc = np.zeros(nlimbs, np.int64)
    prod = np.zeros(nlimbs, np.int64)
    t = start
    while True:
        neg = parity
        count = 1
        prod[0] = 1
        zero = False
        i = 0
        while i < m:
            c = 1
            end = min(m, i + group)
            while i < end:
                v = r[i]
                if v == 0:
                    zero = True
                    break
                if v < 0:
                    v = -v
                    neg ^= 1
                c *= v
                i += 1
            if zero:
                break
            carry = 0
            for limb in range(count):
                x = prod[limb] * c + carry
                prod[limb] = x & _MASK
                carry = x >> LIMB_BITS
            while carry:
                prod[count] = carry & _MASK
                carry >>= LIMB_BITS
                count += 1
        if not zero:
            if neg:
                for limb in range(count):
                    acc[limb] -= prod[limb]
            else:
                for limb in range(count):
                    acc[limb] += prod[limb]

        t += 1
        if t >= stop:
            break
        # bit flipped between gray(t-1) and gray(t) is the lowest set bit of t
        j = 0
        tt = t
        while (tt & 1) == 0:
            tt >>= 1
            j += 1
        g ^= 1 << j
        parity ^= 1
        if (g >> j) & 1:
            for i in range(m):
                r[i] += deltas[j, i]
        else:
            for i in range(m):
                r[i] -= deltas[j, i]
    return acc


@nb.njit(cache=True, parallel=True)
def _blocks_sum(base, deltas, bounds, group, nlimbs):
    nblocks = bounds.shape[0] - 1
    out = np.zeros((nblocks, nlimbs), np.int64)
    for b in nb.prange(nblocks):
        out[b] = _block_sum(base, deltas, bounds[b], bounds[b + 1], group, nlimbs)
    return out


def native_supported(bound: int) -> bool:
    """True when every partial row sum (at most ``bound`` in magnitude) fits one limb."""
    return bound.bit_length() <= LIMB_BITS


def default_workers() -> int:
    return os.cpu_count() or 1


def block_bounds(total: int, workers: int) -> np.ndarray:
    """Split ``range(total)`` into contiguous blocks, at least one per worker."""
    nblocks = max(workers, -(-total // MAX_BLOCK_TERMS))
    nblocks = max(1, min(nblocks, total))
    return np.array([total * b // nblocks for b in range(nblocks + 1)], dtype=np.int64)


def gray_sum_native(base: np.ndarray, deltas: np.ndarray, bound: int, workers: int | None = None) -> int:
    """Exact Gray-walk sum via the compiled kernel.

    ``bound`` must dominate |r_i(g)| for every i and g.
    """
    k, m = deltas.shape
    if m == 0:
        return sum(1 if bin(g).count("1") % 2 == 0 else -1 for g in range(1 << k))
    bits = max(1, bound.bit_length())
    if bits > LIMB_BITS:
        raise ValueError(f"row-sum bound needs {bits} bits; native kernel supports {LIMB_BITS}")
    group = LIMB_BITS // bits
    nlimbs = -(-(m * bits) // LIMB_BITS) + 1
    workers = workers or default_workers()
    bounds = block_bounds(1 << k, workers)

    threads = max(1, min(workers, nb.config.NUMBA_NUM_THREADS))
    previous = nb.get_num_threads()
    nb.set_num_threads(threads)
    try:
        partial = _blocks_sum(
            np.ascontiguousarray(base, dtype=np.int64),
            np.ascontiguousarray(deltas, dtype=np.int64),
            bounds,
            group,
            nlimbs,
        )
    finally:
        nb.set_num_threads(previous)

    limb_totals = [int(v) for v in partial.sum(axis=0, dtype=object)] if partial.shape[0] else []
    return sum(v << (LIMB_BITS * i) for i, v in enumerate(limb_totals))


def gray_sum_python(base, deltas) -> int:
    """Reference Gray-walk sum with Python integers."""
    base = [int(x) for x in np.asarray(base).ravel()]
    deltas = [[int(x) for x in row] for row in np.asarray(deltas)]
    k = len(deltas)
    r = list(base)
    total = 0
    g = 0
    parity = 0
    for t in range(1 << k):
        if t:
            j = (t & -t).bit_length() - 1
            g ^= 1 << j
            parity ^= 1
            d = deltas[j]
            if (g >> j) & 1:
                r = [x + y for x, y in zip(r, d)]
            else:
                r = [x - y for x, y in zip(r, d)]
        term = 1
        for x in r:
            term *= x
            if not term:
                break
        total += -term if parity else term
    return total
