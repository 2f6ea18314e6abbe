import math
from fractions import Fraction

import mpmath
import pytest

from qstieltjes.cyclotomic import CyclotomicElement, embed_numeric, icot_exact
from qstieltjes.errors import ArgumentError, DivergentSeriesError
from qstieltjes.identities import (
    DeltaFunction,
    bernoulli_fourier_sum,
    cot_bernoulli_sum,
    delta_fourier,
    galois_orbit_check,
    kappa,
    kappa_exact,
    l_delta_digamma,
    l_delta_partial,
    l_series_partial,
    reflection_correction,
    reflection_lhs,
    reflection_rhs,
    verify_kappa,
    verify_lemma31,
    verify_lfunction,
    verify_t2,
)
from qstieltjes.numerics import PrecisionBudget
from qstieltjes.special import ResidueSystem, cot_value

B60 = PrecisionBudget(60)


def test_delta_function_is_odd_with_zero_sum():
    d = DeltaFunction(7, 2)
    assert d.values() == [0, 1, 0, 0, -1, 0, 0]
    for n in range(-20, 20):
        assert d(7 - n) == -d(n)
    with pytest.raises(ArgumentError):
        DeltaFunction(8, 4)


def test_reflection_sides_at_q2():
    lhs = reflection_lhs(2, 1, 3, B60)
    rhs = reflection_rhs(2, 1, 3, B60)
    with mpmath.workdps(100):
        closed = mpmath.pi / (mpmath.sqrt(3) * mpmath.log(2)) + mpmath.mpf(1) / 6
        assert abs(rhs.value - closed) <= rhs.error_bound
        assert mpmath.nstr(lhs.value, 12).startswith("2.783426")
    rhs4 = reflection_rhs(2, 1, 4, B60)
    with mpmath.workdps(100):
        assert abs(rhs4.value - (mpmath.pi / mpmath.log(2) + mpmath.mpf(1) / 4)) <= rhs4.error_bound


def test_printed_reflection_formula_misses_by_the_exponential_remainder_at_q2():
    # at q = 2 the printed and corrected affine parts coincide; what is left is
    # (4 pi/log 2) sum_m sin(2 pi m/3)/(exp(4 pi^2 m/log 2) - 1), about 2.9e-24
    report = verify_t2(2, 1, 3, B60)
    corr = reflection_correction(2, 1, 3, B60)
    with mpmath.workdps(100):
        assert abs(report.residual.value - corr.value) <= report.lhs.error_bound + report.rhs.error_bound + corr.error_bound
        assert 1e-24 < corr.value < 1e-23
    assert report.status == "fail"


def test_printed_reflection_formula_is_off_at_order_one_for_q_three_halves():
    report = verify_t2(Fraction(3, 2), 1, 3, B60)
    with mpmath.workdps(80):
        # (q-1)(1/2-x) - (2q-3)(1/2-x) = (2-q)(1/2-x) = 1/12, up to a remainder near 1e-43
        assert abs(report.residual.value - mpmath.mpf(1) / 12) < 1e-40


@pytest.mark.parametrize("q", ["3/2", "2", "5", "7/3"])
@pytest.mark.parametrize("a,b", [(1, 3), (1, 4), (2, 5), (3, 8), (5, 12)])
def test_corrected_reflection_formula_holds(q, a, b):
    assert verify_t2(q, a, b, B60, form="corrected").status == "pass"


def test_perturbed_rhs_fails():
    assert verify_t2(2, 1, 5, B60, form="corrected", perturb=Fraction(1, 10**10)).status == "fail"


def test_verify_t2_needs_half_system():
    with pytest.raises(ArgumentError):
        verify_t2(2, 2, 3, B60)


def test_cot_bernoulli_sum_examples():
    budget = PrecisionBudget(40)
    e = embed_numeric(cot_bernoulli_sum(1, 3), budget)
    with budget.workdps():
        assert abs(e.value - mpmath.sqrt(3) / 3) <= e.error_bound
    assert cot_bernoulli_sum(1, 4) == CyclotomicElement.rational(4, 1)
    c = cot_value(2, 5, budget)
    e = embed_numeric(cot_bernoulli_sum(2, 5), budget)
    with budget.workdps():
        assert abs(e.value - c.value) <= e.error_bound + c.error_bound


def test_hand_evaluation_of_the_three_term_sum():
    # b = 3: (zeta - zeta^-1) B1(1/3) + (zeta^2 - zeta^-2) B1(2/3) + 0
    z = CyclotomicElement.zeta(3)
    hand = (z - z ** -1) * Fraction(-1, 6) + (z**2 - z ** -2) * Fraction(1, 6)
    assert bernoulli_fourier_sum(1, 3) == hand


@pytest.mark.parametrize("b", range(3, 31))
def test_lemma31_for_all_pairs(b):
    budget = PrecisionBudget(30)
    for a in range(1, b):
        if math.gcd(a, b) == 1:
            rep = verify_lemma31(a, b, budget)
            assert rep.status == "pass" and rep.exact_equal, (a, b)
            assert -bernoulli_fourier_sum(a, b) == icot_exact(a, b)


@pytest.mark.parametrize("b", [5, 7, 12])
def test_delta_fourier_transform(b):
    for a in ResidueSystem.of(b).half_system:
        for n in range(b):
            expected = (CyclotomicElement.zeta(b, a * n) - CyclotomicElement.zeta(b, -a * n)) * Fraction(1, b)
            assert delta_fourier(a, b, n) == expected


def test_l_delta_examples():
    budget = PrecisionBudget(40)
    third = l_delta_partial(1, 3, 10**6)
    quarter = l_delta_partial(1, 4, 10**6)
    with mpmath.workdps(60):
        assert abs(third.value - mpmath.pi / (3 * mpmath.sqrt(3))) <= third.error_bound
        assert abs(quarter.value - mpmath.pi / 4) < 1e-6
        assert abs(l_delta_digamma(1, 4, budget).value - mpmath.pi / 4) < mpmath.mpf(10) ** -40
        assert mpmath.nstr(l_delta_digamma(1, 3, budget).value, 12).startswith("0.6045997880")


def test_generic_partial_sum_agrees_with_paired_sum():
    generic = l_series_partial(DeltaFunction(5, 2).values(), 10**5)
    paired = l_delta_partial(2, 5, 10**5)
    assert abs(generic.value - paired.value) <= generic.error_bound + paired.error_bound


def test_even_function_diverges():
    with pytest.raises(DivergentSeriesError):
        l_series_partial([1, 0, 1, 0], 1000)


@pytest.mark.parametrize("b", [3, 4, 5, 6])
def test_lfunction_triangle(b):
    for a in ResidueSystem.of(b).half_system:
        assert all(r.status == "pass" for r in verify_lfunction(a, b, PrecisionBudget(40)))


def test_kappa_examples():
    assert kappa_exact(2, 1, 4) == -CyclotomicElement.zeta(4)
    assert kappa_exact(Fraction(3, 2), 2, 7) == kappa_exact(2, 2, 7) * Fraction(1, 2)
    budget = PrecisionBudget(40)
    _, exact = kappa(2, 1, 3, budget)
    e = embed_numeric(exact, budget)
    with budget.workdps():
        assert abs(e.value + mpmath.mpc(0, 1) / mpmath.sqrt(3)) <= e.error_bound


def test_kappa_numeric_agrees_only_with_the_corrected_formula():
    assert verify_kappa(2, 1, 5, B60, form="corrected").status == "pass"
    assert verify_kappa(2, 1, 5, B60).status == "fail"


@pytest.mark.parametrize("b", [4, 5, 7, 8, 12])
def test_galois_orbits_close_exactly(b):
    reps = galois_orbit_check(2, b)
    assert all(r.exact_equal for r in reps)
    identity_rows = [r for r in reps if r.params["r"] == 1]
    assert all(r.params["image"] == r.params["a"] and r.params["sign"] == 1 for r in identity_rows)


def test_galois_b4_conjugation_folds_with_sign():
    (row,) = [r for r in galois_orbit_check(2, 4) if r.params["r"] == 3]
    assert row.params["image"] == 1 and row.params["sign"] == -1
