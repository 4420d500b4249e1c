import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sylperm.valuation import INF, digit_sum_base2, format_valuation, nu2, nu2_factorial, parse_valuation


def _nu2_by_division(x):
    if x == 0:
        return INF
    x, e = abs(x), 0
    while x % 2 == 0:
        x //= 2
        e += 1
    return e


@pytest.mark.parametrize("x, expected", [(8, 3), (0, INF), (-12, 2), (1, 0), (-1, 0), (3 << 100, 100)])
def test_nu2_examples(x, expected):
    assert nu2(x) == expected


def test_infinity_semantics():
    assert nu2(0) + 5 == INF
    assert nu2(0) > 10**100
    assert format_valuation(nu2(0)) == "inf"
    assert parse_valuation("inf") == INF
    assert parse_valuation(3) == 3
    with pytest.raises(ValueError):
        parse_valuation(-1)


@given(st.integers(-(10**30), 10**30))
def test_nu2_matches_repeated_division(x):
    assert nu2(x) == _nu2_by_division(x)


@given(st.integers(-(10**12), 10**12), st.integers(-(10**12), 10**12))
def test_nu2_additive(x, y):
    # zero absorbs: inf + anything = inf
    assert nu2(x * y) == nu2(x) + nu2(y)


@given(st.integers(0, 60), st.integers(0, 10**15))
def test_nu2_of_power_times_odd(e, k):
    odd = 2 * k + 1
    assert nu2((1 << e) * odd) == e
    assert nu2(-(1 << e) * odd) == e


def test_digit_sum_examples():
    assert digit_sum_base2(7) == 3
    assert digit_sum_base2(0) == 0
    for n in range(40):
        assert digit_sum_base2(1 << n) == 1
    with pytest.raises(ValueError):
        digit_sum_base2(-1)


def test_nu2_factorial_examples():
    assert math.factorial(7) == 5040 == 2**4 * 315
    assert nu2_factorial(7) == 4
    assert nu2_factorial(1) == 0
    assert nu2_factorial(0) == 0
    for n in range(20):
        assert nu2_factorial(1 << n) == (1 << n) - 1


def test_legendre_against_exact_factorials():
    f = 1
    for k in range(301):
        if k:
            f *= k
        assert nu2_factorial(k) == nu2(f), k


@pytest.mark.parametrize("n", range(1, 17))
def test_digit_sum_pivot(n):
    m = (1 << n) - 1
    assert digit_sum_base2(m) == n
    assert max(digit_sum_base2(k) for k in range(m)) < n
