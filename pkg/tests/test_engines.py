import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sylperm import (
    ConsistencyError,
    Engine,
    MinorSpec,
    SizeLimitError,
    minor,
    nu2,
    p_k_sum,
    per_glynn,
    per_laplace,
    per_naive,
    per_ryser,
    per_sum_expansion,
    per_sylvester_fast,
    permanent,
    sylvester,
)
from sylperm import _kernels, engines
from sylperm.engines import engine_supports, expansion_terms, sylvester_minor


def brute_force(a):
    a = np.asarray(a).tolist()
    m = len(a)
    return sum(math.prod(a[i][p[i]] for i in range(m)) for p in itertools.permutations(range(m)))


def subset_dp(a):
    """Permanent by dynamic programming over column subsets, row by row."""
    a = np.asarray(a).tolist()
    m = len(a)
    dp = [0] * (1 << m)
    dp[0] = 1
    for mask in range(1, 1 << m):
        row = a[mask.bit_count() - 1]
        total = 0
        for j in range(m):
            if mask >> j & 1:
                total += row[j] * dp[mask ^ (1 << j)]
        dp[mask] = total
    return dp[-1]


def random_sign(rng, m):
    return rng.choice([-1, 1], size=(m, m)).astype(np.int64)


def random_small(rng, m):
    return rng.integers(-3, 4, size=(m, m)).astype(np.int64)


# frozen from subset_dp, an oracle sharing no code with the engines
FROZEN = {
    2: (8, 2),
    3: (384, 48),
    4: (50692096, 3168256),
}


def test_frozen_values_from_dp_oracle():
    for n, (full, minor_value) in FROZEN.items():
        s = sylvester(n)
        assert subset_dp(s.entries) == full
        assert subset_dp(sylvester_minor(n).entries) == minor_value


# -------------------------------------------------------------- examples


def test_naive_examples():
    assert per_naive(sylvester(1)) == 0
    assert brute_force(sylvester(2).entries) == 8
    assert per_naive(sylvester(2)) == 8
    assert per_naive(np.ones((3, 3), int)) == 6
    assert per_naive(np.zeros((0, 0), int)) == 1


def test_laplace_examples():
    s = sylvester(2)
    minors = [brute_force(minor(s, (k, 1)).entries) for k in range(1, 5)]
    assert minors == [2, 2, 2, 2]
    assert per_laplace(s, 1) == sum(int(s.entries[k - 1, 0]) * minors[k - 1] for k in range(1, 5)) == 8
    assert all(per_laplace(np.ones((3, 3), int), c) == 6 for c in (1, 2, 3))
    assert per_laplace([[7]], 1) == 7
    assert per_laplace(np.zeros((0, 0), int)) == 1
    with pytest.raises(IndexError):
        per_laplace(s, 5)


def test_ryser_examples():
    assert per_ryser(sylvester(2)) == 8
    assert per_ryser(np.ones((4, 4), int)) == 24
    v = per_ryser(sylvester(3))
    assert v != 0 and nu2(v) == 7
    assert v == per_glynn(sylvester(3))


def test_glynn_examples():
    assert per_glynn(sylvester(2)) == 8
    assert per_glynn(np.ones((2, 2), int)) == 2
    assert per_glynn([[-4]]) == -4
    assert per_glynn(np.zeros((0, 0), int)) == 1


def test_glynn_flags_inexact_division(monkeypatch):
    monkeypatch.setattr(engines, "_gray_sum", lambda *args: 3)
    with pytest.raises(ConsistencyError):
        per_glynn(np.ones((3, 3), int))


def test_p_k_sum_examples():
    rng = np.random.default_rng(7)
    b = rng.integers(0, 2, size=(5, 5))
    assert p_k_sum(np.zeros((4, 4), int), 2) == 0
    assert p_k_sum(b, 0) == 1
    assert p_k_sum(b, 1) == int(b.sum())
    assert p_k_sum(b, 5) == brute_force(b)
    # k = 2 by explicit submatrix enumeration
    expected = sum(
        int(b[r0, c0] * b[r1, c1] + b[r0, c1] * b[r1, c0])
        for r0, r1 in itertools.combinations(range(5), 2)
        for c0, c1 in itertools.combinations(range(5), 2)
    )
    assert p_k_sum(b, 2) == expected
    with pytest.raises(ValueError):
        p_k_sum(b, 6)


def test_sum_expansion_examples():
    for m in range(1, 6):
        assert per_sum_expansion(np.ones((m, m), int)) == math.factorial(m)
    # B = J_2: p_1 = 4, p_2 = 2, so 2! - 2*1!*4 + 4*0!*2 = 2
    minus_j = -np.ones((2, 2), int)
    assert p_k_sum(np.ones((2, 2), int), 1) == 4
    assert p_k_sum(np.ones((2, 2), int), 2) == 2
    assert per_sum_expansion(minus_j) == 2 == brute_force(minus_j)
    assert per_sum_expansion(sylvester(2)) == 8
    with pytest.raises(ValueError):
        per_sum_expansion(np.array([[1, 2], [1, 1]]))


def test_expansion_terms_indexing():
    a = sylvester_minor(2)
    terms = expansion_terms(a)
    assert len(terms) == 4
    # last term is k = m: m! * p_0(B)
    assert terms[3] == math.factorial(3)
    assert sum(terms) == brute_force(a.entries) == 2


def test_sylvester_fast_examples():
    assert per_sylvester_fast(2) == 4 * 2 == 8
    assert per_sylvester_fast(3) == per_ryser(sylvester(3))
    assert nu2(per_sylvester_fast(4)) == 15
    for n in (0, 1, 6):
        with pytest.raises(ValueError):
            per_sylvester_fast(n)


@pytest.mark.parametrize(
    "func, size",
    [
        (per_naive, 11),
        (per_laplace, 13),
        (per_ryser, 35),
        (per_glynn, 35),
        (per_sum_expansion, 9),
    ],
)
def test_size_caps(func, size):
    with pytest.raises(SizeLimitError):
        func(np.ones((size, size), int))


def test_p_k_cap():
    with pytest.raises(SizeLimitError):
        p_k_sum(np.ones((9, 9), int), 1)


def test_dispatch_and_support():
    s = sylvester(3)
    values = {e: permanent(s, e) for e in Engine}
    assert set(values.values()) == {384}
    assert not engine_supports(Engine.NAIVE, sylvester(4))
    assert engine_supports(Engine.RYSER, sylvester(5))
    assert not engine_supports(Engine.SYLVESTER_FAST, np.ones((4, 4), int))
    assert not engine_supports(Engine.SUM_EXPANSION, np.full((2, 2), 3))
    with pytest.raises(ValueError):
        permanent(np.ones((4, 4), int), Engine.SYLVESTER_FAST)


# ------------------------------------------------------------ invariants


def test_engine_agreement_random():
    rng = np.random.default_rng(2024)
    cases = 0
    for m in range(0, 9):
        for _ in range(13):
            for make in (random_sign, random_small):
                a = make(rng, m)
                expected = per_naive(a)
                assert per_laplace(a) == expected
                assert per_ryser(a) == expected
                assert per_glynn(a) == expected
                if make is random_sign and m <= 8:
                    assert per_sum_expansion(a) == expected
                cases += 1
    assert cases >= 200


@pytest.mark.parametrize("backend", ["python", "native"])
def test_gray_backends_match_naive(backend):
    rng = np.random.default_rng(11)
    for m in range(1, 9):
        for _ in range(5):
            a = random_small(rng, m)
            expected = per_naive(a)
            assert per_ryser(a, backend=backend) == expected
            assert per_glynn(a, backend=backend) == expected


def test_glynn_matches_ryser_up_to_12():
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(1, 13))
        a = random_sign(rng, m)
        assert per_glynn(a) == per_ryser(a)


def test_native_matches_python_at_medium_size():
    rng = np.random.default_rng(3)
    for m in (10, 11, 12):
        a = random_small(rng, m)
        ref = per_ryser(a, backend="python")
        assert per_ryser(a, backend="native") == ref
        assert per_glynn(a, backend="native") == ref == per_glynn(a, backend="python")


def test_wide_entries_fall_back_to_python():
    a = np.full((10, 10), 1 << 40, dtype=np.int64)
    assert per_ryser(a) == math.factorial(10) * (1 << 400)
    with pytest.raises(ValueError):
        per_ryser(a, backend="native")


@pytest.mark.parametrize("workers", [1, 2, 3, 8, 64])
def test_worker_count_does_not_change_result(workers):
    s = sylvester(4)
    assert per_ryser(s, workers=workers) == FROZEN[4][0]
    assert per_glynn(s, workers=workers) == FROZEN[4][0]


def test_block_bounds_cover_range():
    for total, workers in [(1, 8), (16, 3), (1 << 20, 7), (1 << 34, 2)]:
        b = _kernels.block_bounds(total, workers)
        assert b[0] == 0 and b[-1] == total
        assert np.all(np.diff(b) > 0)
        assert np.all(np.diff(b) <= _kernels.MAX_BLOCK_TERMS)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.data())
def test_permutation_invariance(m, data):
    a = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=m * m, max_size=m * m))).reshape(m, m)
    rp = data.draw(st.permutations(range(m)))
    cp = data.draw(st.permutations(range(m)))
    assert per_ryser(a[list(rp)][:, list(cp)]) == per_ryser(a)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.data())
def test_transpose_and_row_scaling(m, data):
    a = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=m * m, max_size=m * m))).reshape(m, m)
    c = data.draw(st.integers(-9, 9))
    row = data.draw(st.integers(0, m - 1))
    base = per_ryser(a)
    assert per_ryser(a.T) == base
    scaled = a.copy()
    scaled[row] *= c
    assert per_ryser(scaled) == c * base


@pytest.mark.parametrize("m", range(0, 13))
def test_all_ones_is_factorial(m):
    assert per_ryser(np.ones((m, m), int)) == math.factorial(m)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.data())
def test_laplace_column_independence(m, data):
    a = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=m * m, max_size=m * m))).reshape(m, m)
    values = {per_laplace(a, j) for j in range(1, m + 1)}
    assert len(values) == 1


@pytest.mark.parametrize("n", [2, 3])
def test_first_column_minors_equal(n):
    s = sylvester(n)
    values = {per_ryser(minor(s, MinorSpec(k, 1))) for k in range(1, s.size + 1)}
    assert values == {FROZEN[n][1]}


# Ryser and Glynn agreed on this value in separate runs; this pins the Glynn side
H5_MINOR_PERMANENT = 213416371625656320


@pytest.mark.deep
def test_h5_minor_glynn():
    value = per_glynn(sylvester_minor(5))
    assert value == H5_MINOR_PERMANENT
    assert nu2(value) == 32 - 5 - 1
    assert 32 * value == 6829323892021002240
