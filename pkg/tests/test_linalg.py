"""Exact sparse linear algebra: ranks, consensus, products, io, solving."""
import random
from fractions import Fraction

import pytest

from ogclab.linalg import (RankError, SparseIntMatrix, identity, kernel_basis,
                           multiply, read_matrix_market, solve_columns,
                           write_matrix_market)


def from_rows(rows):
    nrows = len(rows)
    ncols = max((len(r) for r in rows), default=0)
    m = SparseIntMatrix(nrows, ncols)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                m[i, j] = v
    return m


def test_identity_rank():
    assert identity(2).rank("rational") == 2


def test_zero_rank():
    assert SparseIntMatrix(5, 7).rank("rational") == 0


def test_rank_known():
    m = from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert m.rank("rational") == 2
    assert m.rank(("modular", 10007)) == 2
    assert m.rank("consensus", seed=3) == 2


def test_rank_with_fractions():
    m = SparseIntMatrix(2, 2)
    m[0, 0] = Fraction(1, 2)
    m[1, 1] = Fraction(3, 7)
    assert m.rank("rational") == 2


def test_rank_transpose_invariance():
    rng = random.Random(11)
    for _ in range(25):
        m = SparseIntMatrix(6, 8)
        for _ in range(12):
            m[rng.randrange(6), rng.randrange(8)] = rng.randint(-3, 3)
        assert m.rank("rational") == m.transpose().rank("rational")


def test_rank_modular_le_rational():
    # 2*I has rank 0 mod 2 but full rank over Q
    m = from_rows([[2, 0], [0, 2]])
    assert m.rank(("modular", 2)) == 0
    assert m.rank("rational") == 2


def test_consensus_detects_bad_small_prime_set():
    m = from_rows([[2, 0], [0, 2]])
    # random 31-bit primes never divide 2; consensus agrees with rational
    assert m.rank("consensus", seed=0) == 2


def test_check_consensus_passes():
    m = from_rows([[1, 1, 0], [0, 1, 1]])
    assert m.check_consensus(seed=0) == 2


def test_multiply_identities():
    rng = random.Random(5)
    a = SparseIntMatrix(4, 5)
    for _ in range(8):
        a[rng.randrange(4), rng.randrange(5)] = rng.randint(-4, 4)
    assert multiply(a, SparseIntMatrix(5, 3)).is_zero()
    assert multiply(identity(4), a) == a
    assert multiply(a, identity(5)) == a


def test_multiply_associative():
    rng = random.Random(9)
    for _ in range(10):
        a = SparseIntMatrix(3, 4)
        b = SparseIntMatrix(4, 5)
        c = SparseIntMatrix(5, 2)
        for m, (p, q) in ((a, (3, 4)), (b, (4, 5)), (c, (5, 2))):
            for _ in range(6):
                m[rng.randrange(p), rng.randrange(q)] = rng.randint(-3, 3)
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_multiply_shape_mismatch():
    with pytest.raises(ValueError):
        multiply(SparseIntMatrix(2, 3), SparseIntMatrix(2, 3))


def test_kernel_basis():
    m = from_rows([[1, 1, 0], [0, 0, 1]])
    basis = kernel_basis(m)
    assert len(basis) == 1
    vec = basis[0]
    # check m @ vec == 0
    for i in range(m.nrows):
        assert sum(m[(i, j)] * v for j, v in vec.items()) == 0


def test_kernel_rank_nullity():
    rng = random.Random(3)
    for _ in range(20):
        m = SparseIntMatrix(5, 7)
        for _ in range(10):
            m[rng.randrange(5), rng.randrange(7)] = rng.randint(-2, 2)
        assert len(kernel_basis(m)) == 7 - m.rank("rational")


def test_solve_columns_exact():
    rng = random.Random(17)
    for _ in range(20):
        d = SparseIntMatrix(6, 5)
        for _ in range(12):
            d[rng.randrange(6), rng.randrange(5)] = rng.randint(-3, 3)
        x0 = SparseIntMatrix(5, 2)
        for _ in range(5):
            x0[rng.randrange(5), rng.randrange(2)] = rng.randint(-3, 3)
        c = multiply(d, x0)
        x = solve_columns(d, c)
        assert x is not None
        assert multiply(d, x) == c


def test_solve_columns_inconsistent():
    d = from_rows([[1, 0], [0, 0]])
    c = SparseIntMatrix(2, 1)
    c[1, 0] = 1
    assert solve_columns(d, c) is None


def test_matrix_market_round_trip(tmp_path):
    m = from_rows([[0, 2, 0], [-1, 0, 5]])
    path = tmp_path / "m.mtx"
    write_matrix_market(m, str(path), comment="test")
    back = read_matrix_market(str(path))
    assert back == m
    header = path.read_text().splitlines()[0]
    assert header == "%%MatrixMarket matrix coordinate integer general"


def test_matrix_market_rejects_fractions(tmp_path):
    m = SparseIntMatrix(1, 1)
    m[0, 0] = Fraction(1, 2)
    with pytest.raises(ValueError):
        write_matrix_market(m, str(tmp_path / "x.mtx"))


def test_rank_subadditivity_on_chain():
    # d1.d2 = 0 implies rank d1 + rank d2 <= middle dimension
    d2 = from_rows([[1], [-1], [0]])
    d1 = from_rows([[1, 1, 0], [0, 0, 0]])
    assert multiply(d1, d2).is_zero()
    assert d1.rank("rational") + d2.rank("rational") <= 3
