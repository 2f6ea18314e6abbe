import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from qstieltjes.cyclotomic import (
    CyclotomicElement,
    cyclotomic_add,
    cyclotomic_inv,
    cyclotomic_mul,
    cyclotomic_polynomial,
    embed_numeric,
    galois_apply,
    icot_exact,
)
from qstieltjes.errors import ArgumentError, DomainError
from qstieltjes.numerics import PrecisionBudget
from qstieltjes.special import cot_value, totient

Z = CyclotomicElement.zeta
LEVELS = [3, 4, 5, 7, 8, 9, 12, 15]


def elements(level):
    phi = totient(level)
    coeff = st.fractions(min_value=-20, max_value=20, max_denominator=12)
    return st.lists(coeff, min_size=phi, max_size=phi).map(lambda c: CyclotomicElement(level, tuple(c)))


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    for b in range(1, 40):
        assert len(cyclotomic_polynomial(b)) - 1 == totient(b)


def test_small_examples():
    assert cyclotomic_mul(Z(4), Z(4)) == CyclotomicElement.rational(4, -1)
    assert cyclotomic_add(Z(3), Z(3, 2)) == CyclotomicElement.rational(3, -1)
    assert Z(5) * Z(5, 4) == CyclotomicElement.rational(5, 1)


@pytest.mark.parametrize("b", LEVELS)
def test_root_of_unity_relations(b):
    assert Z(b) ** b == CyclotomicElement.rational(b, 1)
    phi = cyclotomic_polynomial(b)
    assert CyclotomicElement.from_poly(b, phi).is_zero()


@pytest.mark.parametrize("b", [5, 12])
@given(data=st.data())
def test_ring_axioms(b, data):
    u, v, w = (data.draw(elements(b)) for _ in range(3))
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u * v == v * u
    assert u + (-u) == CyclotomicElement.rational(b, 0)
    if not u.is_zero():
        assert u * cyclotomic_inv(u) == CyclotomicElement.rational(b, 1)


@pytest.mark.parametrize("b", [7, 8])
@given(data=st.data())
def test_galois_is_a_ring_homomorphism(b, data):
    u, v = data.draw(elements(b)), data.draw(elements(b))
    r = data.draw(st.sampled_from([r for r in range(1, b) if math.gcd(r, b) == 1]))
    assert galois_apply(r, u * v) == galois_apply(r, u) * galois_apply(r, v)
    assert galois_apply(r, u + v) == galois_apply(r, u) + galois_apply(r, v)


def test_galois_conjugation_on_i():
    assert galois_apply(3, Z(4)) == -Z(4)


def test_galois_needs_unit():
    with pytest.raises(ArgumentError):
        galois_apply(2, Z(4))


def test_level_mismatch_and_zero_inverse():
    with pytest.raises(ArgumentError):
        Z(3) + Z(5)
    with pytest.raises(DomainError):
        CyclotomicElement.rational(5, 0).inverse()


def test_lift_preserves_value():
    budget = PrecisionBudget(30)
    u = Z(3) * Fraction(2, 3) + 5
    lifted = u.lift(12)
    with budget.workdps():
        assert abs(embed_numeric(u, budget).value - embed_numeric(lifted, budget).value) < mpmath.mpf(10) ** -40


def test_icot_examples():
    assert icot_exact(1, 4) == Z(4)
    budget = PrecisionBudget(40)
    e = embed_numeric(icot_exact(1, 3), budget)
    with budget.workdps():
        assert abs(e.value - mpmath.mpc(0, 1) / mpmath.sqrt(3)) <= e.error_bound


def test_icot_pole():
    with pytest.raises(DomainError):
        icot_exact(0, 5)


def test_embed_examples():
    budget = PrecisionBudget(30)
    with budget.workdps():
        assert embed_numeric(CyclotomicElement.rational(7, 1), budget).value == 1
        assert abs(embed_numeric(Z(4), budget).value - mpmath.mpc(0, 1)) < mpmath.mpf(10) ** -30


def test_icot_embeds_to_i_cot_for_all_small_levels():
    budget = PrecisionBudget(30)
    for b in range(3, 31):
        for a in range(1, b):
            if math.gcd(a, b) != 1:
                continue
            e = embed_numeric(icot_exact(a, b), budget)
            c = cot_value(a, b, budget)
            with budget.workdps():
                assert abs(e.value - mpmath.mpc(0, c.value)) <= e.error_bound + c.error_bound, (a, b)
