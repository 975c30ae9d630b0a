import pytest
import sympy
from hypothesis import given, strategies as st

from algebroid_kit.errors import NotAComplex
from algebroid_kit.exactlin import QMatrix, kernel_basis, quotient_dim, rank, rref, solve

from helpers import rationals

matrices = st.integers(0, 4).flatmap(
    lambda r: st.integers(0, 4).flatmap(
        lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r).map(
            lambda rows, r=r, c=c: QMatrix(rows, r, c))))


def test_rref_examples():
    red, piv = rref(QMatrix.identity(3))
    assert red == QMatrix.identity(3) and piv == [0, 1, 2]
    red, piv = rref(QMatrix([[1, 2], [2, 4]]))
    assert red == QMatrix([[1, 2], [0, 0]]) and piv == [0]
    red, piv = rref(QMatrix.zeros(2, 3))
    assert red == QMatrix.zeros(2, 3) and piv == []


def test_kernel_examples():
    assert kernel_basis(QMatrix.identity(4)) == []
    (v,) = kernel_basis(QMatrix([[1, 1]]))
    assert v[0] == -v[1] != 0
    assert len(kernel_basis(QMatrix.zeros(2, 3))) == 3


def test_quotient_dim_examples():
    assert quotient_dim(QMatrix([[0]]), QMatrix([[0]])) == 1
    assert quotient_dim(QMatrix([[0, 0]]), QMatrix([[1], [0]])) == 1
    assert quotient_dim(QMatrix([[1, 0]]), QMatrix([[0], [1]])) == 0
    with pytest.raises(NotAComplex):
        quotient_dim(QMatrix([[1, 0]]), QMatrix([[1], [0]]))
    with pytest.raises(ValueError):
        quotient_dim(QMatrix([[1, 0]]), QMatrix([[1]]))


@given(matrices)
def test_rank_nullity_and_kernel_exact(m):
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


@given(matrices)
def test_rank_matches_sympy(m):
    if m.rows and m.cols:
        ref = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.entries]).rank()
        assert rank(m) == ref


@given(matrices, st.lists(rationals, min_size=4, max_size=4))
def test_solve_consistent_systems(m, x):
    b = m.apply(x[:m.cols])
    sol = solve(m, b)
    assert sol is not None and m.apply(sol) == b


def test_zero_sized_shapes():
    assert rank(QMatrix.zeros(0, 3)) == 0
    assert (QMatrix.zeros(2, 0) @ QMatrix.zeros(0, 3)) == QMatrix.zeros(2, 3)
    assert quotient_dim(QMatrix.zeros(0, 2), QMatrix.zeros(2, 0)) == 2
