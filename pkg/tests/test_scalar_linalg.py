from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measurechu.errors import BackendMismatch, DivisionByZero, SingularPairing
from measurechu.linalg import Matrix, unvec_col_major, vec_col_major
from measurechu.scalar import EXACT, FLOAT, Scalar, parse_rational, scalar_sum

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussian = st.tuples(fractions, fractions)


def ex(re, im=0):
    return Scalar(re, im, EXACT)


@given(gaussian, gaussian)
def test_exact_arithmetic_matches_fraction_oracle(a, b):
    x, y = ex(*a), ex(*b)
    # oracle: (a + bi)(c + di) by hand over Fractions
    s = x + y
    assert (s.re, s.im) == (a[0] + b[0], a[1] + b[1])
    p = x * y
    assert (p.re, p.im) == (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])
    if b != (0, 0):
        q = x / y
        assert q * y == x


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        ex(1) / ex(0)


def test_backend_mixing_is_refused():
    with pytest.raises(BackendMismatch):
        ex(1) + Scalar(1.0, 0.0, FLOAT)
    # plain ints are neutral on either backend
    assert (ex(1, 2) + 3) == ex(4, 2)
    assert (Scalar(0.5, 0.0, FLOAT) * 2) == Scalar(1.0, 0.0, FLOAT)


def test_parse_rational_and_json():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert ex(Fraction(5, 2)).to_json() == "5/2"
    assert ex(2, -1).to_json() == ["2", "-1"]
    assert Scalar.from_json(["1/3", "2"], EXACT) == ex(Fraction(1, 3), 2)
    assert Scalar(0.1, 0.0, FLOAT).to_json() == 0.1


def test_float_sum_is_compensated():
    vals = [Scalar(v, 0.0, FLOAT) for v in (1e16, 1.0, -1e16)]
    assert scalar_sum(vals, FLOAT).re == 1.0


small = st.integers(-4, 4)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def det_oracle(rows):
    """Leibniz expansion, independent of elimination."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= rows[i][perm[i]]
        total += -prod if inv % 2 else prod
    return total


@given(st.integers(1, 4).flatmap(square))
def test_inverse_and_rank_against_determinant(rows):
    M = Matrix.from_rows(rows, EXACT)
    d = det_oracle(rows)
    assert M.is_invertible() == (d != 0)
    if d:
        assert M @ M.inverse() == Matrix.identity(M.rows, EXACT)
        assert M.rank() == M.rows
    else:
        with pytest.raises(SingularPairing):
            M.inverse()
        assert M.rank() < M.rows


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_rank_nullity(r, c, data):
    rows = data.draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    M = Matrix.from_rows(rows, EXACT)
    null = M.nullspace()
    assert M.rank() + len(null) == c
    for v in null:
        assert all(x.is_zero() for x in M.apply(v))


def test_rref_known():
    R, piv = Matrix.from_rows([[1, 2, 0], [2, 4, 0]], EXACT).rref()
    assert piv == (0,)
    assert R == Matrix.from_rows([[1, 2, 0], [0, 0, 0]], EXACT)


def test_kron_and_vec_roundtrip():
    A = Matrix.from_rows([[1, 2], [3, 4]], EXACT)
    B = Matrix.from_rows([[0, 1]], EXACT)
    K = A.kron(B)
    assert K.shape == (2, 4)
    assert [c.re for c in K.row(1)] == [0, 3, 0, 4]
    v = vec_col_major(A)
    assert [c.re for c in v] == [1, 3, 2, 4]
    assert unvec_col_major(v, 2, 2, EXACT) == A


def test_float_pivot_threshold():
    M = Matrix.from_rows([[1.0, 1.0], [1.0, 1.0 + 1e-13]], FLOAT)
    assert M.rank() == 1
