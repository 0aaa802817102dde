"""Exact integer kernels against a slow Fraction elimination oracle."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cuboid_complex import _exactcore
from cuboid_complex._exactcore import pure


def oracle_rank(rows, ncols):
    """Plain Gaussian elimination over Fraction, no pivot strategy."""
    mat = [[Fraction(row.get(j, 0)) for j in range(ncols)] for row in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return rank


def dense_to_rows(mat):
    return [{j: v for j, v in enumerate(row) if v} for row in mat]


def random_int_matrix(rng, nrows, ncols, lo=-9, hi=9):
    return [[rng.randint(lo, hi) for _ in range(ncols)] for _ in range(nrows)]


def test_rank_identity_and_zero():
    eye = dense_to_rows([[1 if i == j else 0 for j in range(7)] for i in range(7)])
    assert _exactcore.ff_rank(eye, 7) == 7
    assert _exactcore.ff_rank([], 5) == 0
    assert _exactcore.ff_rank([{}, {}], 5) == 0


def test_rank_single_entries():
    assert _exactcore.ff_rank([{3: 17}], 5) == 1
    assert _exactcore.ff_rank([{0: 2}, {0: -3}], 1) == 1


@pytest.mark.parametrize("seed", range(8))
def test_rank_random_square_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    dense = random_int_matrix(rng, n, n)
    rows = dense_to_rows(dense)
    assert _exactcore.ff_rank(rows, n) == oracle_rank(rows, n)


@pytest.mark.parametrize("seed", range(8))
def test_rank_deficient_products(seed):
    # A (m x r) @ B (r x n) has rank at most r and generically exactly r.
    rng = random.Random(100 + seed)
    m, r, n = rng.randint(4, 9), rng.randint(1, 3), rng.randint(4, 9)
    a = random_int_matrix(rng, m, r)
    b = random_int_matrix(rng, r, n)
    prod = _exactcore.imat_mul(a, b)
    rows = dense_to_rows(prod)
    got = _exactcore.ff_rank(rows, n)
    assert got == oracle_rank(rows, n)
    assert got <= r


def test_rank_duplicated_and_scaled_rows():
    rng = random.Random(7)
    base = random_int_matrix(rng, 3, 6)
    stacked = base + [[4 * v for v in base[0]], base[1], [0] * 6]
    rows = dense_to_rows(stacked)
    assert _exactcore.ff_rank(rows, 6) == oracle_rank(rows, 6) == 3


def test_fj_inverse_round_trip():
    rng = random.Random(11)
    for _ in range(6):
        n = rng.randint(1, 8)
        dense = random_int_matrix(rng, n, n)
        while oracle_rank(dense_to_rows(dense), n) < n:
            dense = random_int_matrix(rng, n, n)
        num, den = _exactcore.fj_inverse(dense)
        assert den != 0
        prod = _exactcore.imat_mul(dense, num)
        for i in range(n):
            for j in range(n):
                assert prod[i][j] == (den if i == j else 0)


def test_fj_inverse_rejects_singular():
    with pytest.raises(ZeroDivisionError):
        _exactcore.fj_inverse([[1, 2], [2, 4]])


def test_imat_mul_matches_naive():
    rng = random.Random(13)
    a = random_int_matrix(rng, 4, 6)
    b = random_int_matrix(rng, 6, 3)
    want = [[sum(a[i][k] * b[k][j] for k in range(6)) for j in range(3)]
            for i in range(4)]
    assert _exactcore.imat_mul(a, b) == want


def test_spmul_matches_naive():
    rng = random.Random(17)
    a = dense_to_rows(random_int_matrix(rng, 5, 7))
    b = dense_to_rows(random_int_matrix(rng, 7, 4))
    got = _exactcore.spmul(a, b)
    for i in range(5):
        for j in range(4):
            want = sum(a[i].get(k, 0) * b[k].get(j, 0) for k in range(7))
            assert got[i].get(j, 0) == want


@pytest.mark.skipif(_exactcore.BACKEND == "pure",
                    reason="no compiled backend to compare against")
def test_backends_agree_bit_for_bit():
    rng = random.Random(23)
    for _ in range(10):
        m, n = rng.randint(2, 10), rng.randint(2, 10)
        dense = random_int_matrix(rng, m, n, lo=-50, hi=50)
        rows = dense_to_rows(dense)
        assert _exactcore.ff_rank([dict(r) for r in rows], n) == \
            pure.ff_rank([dict(r) for r in rows], n)
    square = random_int_matrix(rng, 6, 6)
    while oracle_rank(dense_to_rows(square), 6) < 6:
        square = random_int_matrix(rng, 6, 6)
    assert _exactcore.fj_inverse(square) == pure.fj_inverse(square)
    a = random_int_matrix(rng, 5, 6)
    b = random_int_matrix(rng, 6, 4)
    assert _exactcore.imat_mul(a, b) == pure.imat_mul(a, b)
    assert _exactcore.spmul(dense_to_rows(a), dense_to_rows(b)) == \
        pure.spmul(dense_to_rows(a), dense_to_rows(b))


small_matrices = st.integers(2, 6).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(-20, 20), min_size=n, max_size=n),
        min_size=1, max_size=8).map(lambda m: (m, n)))


@settings(max_examples=40, deadline=None)
@given(small_matrices)
def test_rank_property_matches_oracle(case):
    dense, ncols = case
    rows = dense_to_rows(dense)
    assert _exactcore.ff_rank([dict(r) for r in rows], ncols) == \
        oracle_rank(rows, ncols)


@settings(max_examples=25, deadline=None)
@given(small_matrices, st.integers(-5, 5))
def test_rank_unchanged_by_appending_combination(case, c):
    dense, ncols = case
    combo = [c * v for v in dense[0]]
    if len(dense) > 1:
        combo = [a + b for a, b in zip(combo, dense[1])]
    rows = dense_to_rows(dense)
    grown = dense_to_rows(dense + [combo])
    assert _exactcore.ff_rank(grown, ncols) == _exactcore.ff_rank(rows, ncols)
