from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from siphonkit.rational import RationalMatrix, fmt, kernel_basis, parse_rational, primitive

small = st.integers(-4, 4)


def matrices(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda r: st.integers(1, max_n).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@pytest.mark.parametrize("tok,val", [("3", F(3)), ("-2/6", F(-1, 3)), ("0.25", F(1, 4)), ("2.14", F(107, 50))])
def test_parse_rational(tok, val):
    assert parse_rational(tok) == val


@pytest.mark.parametrize("bad", ["", "x", "1/0", "1//2"])
def test_parse_rational_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_fmt_is_canonical():
    assert fmt(F(4, 2)) == "2"
    assert fmt(F(-3, 6)) == "-1/2"
    assert fmt(F(0)) == "0"


def test_primitive():
    assert primitive([F(2, 3), F(4, 3), F(0)]) == (1, 2, 0)


def test_from_text_comments_and_shape():
    M = RationalMatrix.from_text("# c\n1 2/3\n-1 0  # tail\n")
    assert M.shape == (2, 2)
    assert M[0, 1] == F(2, 3)


def test_inverse_of_small_matrix():
    A = RationalMatrix([[-2, 1], [1, -2]])
    assert A.inverse().neg() == RationalMatrix([[F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)]])


def test_singular_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        RationalMatrix([[1, 2], [2, 4]]).inverse()


@settings(max_examples=150, derandomize=True, deadline=None)
@given(matrices())
def test_kernel_basis_is_a_basis(rows):
    M = RationalMatrix(rows)
    K = kernel_basis(M)
    assert len(K) == M.shape[1] - M.rank()
    for k in K:
        assert not any(M.matvec(k))
        assert all(isinstance(x, (int, F)) and F(x).denominator == 1 for x in k)
    if K:
        assert RationalMatrix(K).rank() == len(K)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(matrices(3))
def test_rank_matches_numpy(rows):
    np = pytest.importorskip("numpy")
    assert RationalMatrix(rows).rank() == np.linalg.matrix_rank(np.array(rows, dtype=float))


@settings(max_examples=100, derandomize=True, deadline=None)
@given(matrices(3))
def test_inverse_roundtrip(rows):
    M = RationalMatrix(rows)
    if not M.is_square or M.rank() < M.shape[0]:
        return
    assert M.matmul(M.inverse()) == RationalMatrix.identity(M.shape[0])
