"""Dyadic (2-adic) valuations.

The valuation of 0 is ``math.inf``: it absorbs addition and compares above
every integer, which is exactly the convention needed for bounds on terms
that may vanish.
"""

from __future__ import annotations

import math

INF = math.inf

Valuation = int | float


def nu2(x: int) -> Valuation:
    """Exponent of the largest power of 2 dividing ``x``; ``inf`` for 0."""
    x = int(x)
    if x == 0:
        return INF
    return (x & -x).bit_length() - 1


def digit_sum_base2(k: int) -> int:
    if k < 0:
        raise ValueError(f"digit sum is defined for k >= 0, got {k}")
    return int(k).bit_count()


def nu2_factorial(k: int) -> int:
    """nu2(k!) by Legendre's formula, k - (number of ones in binary k)."""
    if k < 0:
        raise ValueError(f"factorial of negative {k}")
    return k - digit_sum_base2(k)


def format_valuation(v: Valuation) -> int | str:
    """JSON rendering: an int, or the string ``"inf"``."""
    if v == INF:
        return "inf"
    return int(v)


def parse_valuation(v: int | str) -> Valuation:
    if v == "inf":
        return INF
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ValueError(f"not a valuation: {v!r}")
    return v
