from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from qstieltjes.errors import ArgumentError
from qstieltjes.lattice import lll_reduce


def gram_schmidt(rows):
    basis, norms, mu = [], [], []
    for i, b in enumerate(rows):
        v = [Fraction(x) for x in b]
        mrow = []
        for j, u in enumerate(basis):
            m = sum(Fraction(x) * y for x, y in zip(b, u)) / norms[j]
            mrow.append(m)
            v = [x - m * y for x, y in zip(v, u)]
        basis.append(v)
        norms.append(sum(x * x for x in v))
        mu.append(mrow)
    return norms, mu


def determinant_sq(rows):
    norms, _ = gram_schmidt(rows)
    out = Fraction(1)
    for n in norms:
        out *= n
    return out


matrices = st.integers(min_value=2, max_value=5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-10**6, 10**6), min_size=n, max_size=n), min_size=n, max_size=n)
).filter(lambda m: sympy.Matrix(m).det() != 0)


@given(matrices)
def test_output_is_lll_reduced_and_spans_the_same_lattice(rows):
    red = lll_reduce(rows)
    norms, mu = gram_schmidt(red.basis)
    for i in range(len(mu)):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, len(norms)):
        assert norms[k] >= (Fraction(99, 100) - mu[k][k - 1] ** 2) * norms[k - 1]
    # unimodular change of basis keeps the Gram determinant
    assert determinant_sq(red.basis) == determinant_sq(rows)
    assert red.gs_norms_squared() == norms


def test_known_short_vector():
    rows = [[1, 0, 0, 10**9], [0, 1, 0, 2 * 10**9 + 1], [0, 0, 1, 3 * 10**9 + 1]]
    red = lll_reduce(rows)
    assert min(sum(x * x for x in r) for r in red.basis) <= 6


def test_guards():
    with pytest.raises(ArgumentError):
        lll_reduce([])
    with pytest.raises(ArgumentError):
        lll_reduce([[1, 2], [2, 4]])
    with pytest.raises(ArgumentError):
        lll_reduce([[1, 0], [0, 1]], delta=Fraction(1, 5))
