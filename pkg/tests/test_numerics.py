from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from qstieltjes.errors import ArgumentError, DomainError, EvaluationError
from qstieltjes.numerics import BoundedValue, PrecisionBudget, richardson_limit, sum_geometric_tail, to_mp


def test_budget_defaults():
    b = PrecisionBudget(30)
    assert b.working_digits == 50
    assert b.tail_tolerance == Fraction(1, 10**40)
    with b.workdps():
        assert mpmath.mp.dps == 50


def test_budget_rejects_tiny_targets():
    with pytest.raises(ArgumentError):
        PrecisionBudget(0)


def test_to_mp_fraction_is_exact_at_working_precision():
    with mpmath.workdps(60):
        v = to_mp(Fraction(1, 3))
        assert abs(v * 3 - 1) < mpmath.mpf(10) ** -58


def test_geometric_series_sums_to_one():
    budget = PrecisionBudget(40)
    total = sum_geometric_tail(lambda n: mpmath.mpf(2) ** -n, 0.5, budget)
    with budget.workdps():
        assert abs(total.value - 1) <= total.error_bound
    assert total.error_bound <= mpmath.mpf(10) ** -40


def test_zero_terms_give_exact_zero():
    total = sum_geometric_tail(lambda n: 0, 0.5, PrecisionBudget(20))
    assert total.value == 0 and total.error_bound == 0


def test_q_reciprocal_series_against_partial_sum_oracle():
    # sum 2^(n/2)/(2^n - 1): 10^4 brute-force terms, tail below 2^(-5000)
    budget = PrecisionBudget(50)
    total = sum_geometric_tail(lambda n: mpmath.power(2, mpmath.mpf(n) / 2) / (mpmath.power(2, n) - 1), 0.75, budget)
    with mpmath.workdps(80):
        oracle = mpmath.fsum(mpmath.power(2, mpmath.mpf(n) / 2) / (mpmath.power(2, n) - 1) for n in range(1, 10**4))
        assert abs(total.value - oracle) <= total.error_bound
    assert mpmath.nstr(total.value, 3) == "3.36"


def test_ratio_bound_at_least_one_is_refused():
    with pytest.raises(DomainError):
        sum_geometric_tail(lambda n: 1, 1, PrecisionBudget(20))


def test_non_finite_term_is_an_evaluation_error():
    with pytest.raises(EvaluationError):
        sum_geometric_tail(lambda n: mpmath.inf, 0.5, PrecisionBudget(20))


def test_more_digits_never_widen_the_bound():
    bounds = []
    for d in (20, 40, 80):
        bounds.append(sum_geometric_tail(lambda n: mpmath.mpf(3) ** -n, 1 / 3, PrecisionBudget(d)).error_bound)
    assert bounds[0] >= bounds[1] >= bounds[2]


def test_rerun_at_double_precision_lands_inside_the_bound():
    term = lambda n: 1 / (mpmath.mpf(n) * mpmath.power(2, n))  # noqa: E731 - sums to log 2
    low = sum_geometric_tail(term, 0.5, PrecisionBudget(25))
    high = sum_geometric_tail(term, 0.5, PrecisionBudget(50))
    with mpmath.workdps(70):
        assert abs(low.value - high.value) <= low.error_bound
        assert abs(high.value - mpmath.log(2)) <= high.error_bound


def test_richardson_linear_function():
    samples = [(Fraction(1, 2**j), 1 + Fraction(1, 2**j)) for j in range(1, 4)]
    r = richardson_limit([(to_mp(h), to_mp(v)) for h, v in samples], 2)
    assert abs(r.value - 1) <= r.error_bound + mpmath.mpf(10) ** -14


def test_richardson_constant_has_zero_increment():
    r = richardson_limit([(mpmath.mpf(1) / 2**j, mpmath.mpf(7)) for j in range(4)], 3)
    assert r.value == 7
    assert r.error_bound < mpmath.mpf(10) ** -12


def test_richardson_exponential():
    with mpmath.workdps(40):
        samples = [(mpmath.mpf(2) ** -j, mpmath.exp(mpmath.mpf(2) ** -j)) for j in range(1, 9)]
        r = richardson_limit(samples, 4)
        assert abs(r.value - 1) < mpmath.mpf(10) ** -10
        assert abs(r.value - 1) <= r.error_bound


def test_richardson_reproduces_polynomial_constant_term():
    with mpmath.workdps(50):
        poly = lambda h: 3 - 2 * h + 5 * h**2 - h**3  # noqa: E731
        r = richardson_limit([(mpmath.mpf(2) ** -j, poly(mpmath.mpf(2) ** -j)) for j in range(5)], 3)
        assert abs(r.value - 3) < mpmath.mpf(10) ** -45


def test_richardson_needs_enough_samples():
    with pytest.raises(ArgumentError):
        richardson_limit([(1, 1), (0.5, 1)], 2)


def test_richardson_needs_halving_steps():
    with pytest.raises(ArgumentError):
        richardson_limit([(1, 1), (0.3, 1), (0.1, 1)], 2)


@given(st.fractions(min_value=-100, max_value=100, max_denominator=1000),
       st.fractions(min_value=-100, max_value=100, max_denominator=1000))
def test_bounded_arithmetic_encloses_exact_result(x, y):
    with mpmath.workdps(30):
        bx, by = BoundedValue.rounded(to_mp(x)), BoundedValue.rounded(to_mp(y))
        for got, exact in ((bx + by, x + y), (bx - by, x - y), (bx * by, x * y)):
            with mpmath.workdps(60):
                assert abs(got.value - to_mp(exact)) <= got.error_bound
        if y != 0:
            q = bx / by
            with mpmath.workdps(60):
                assert abs(q.value - to_mp(x / y)) <= q.error_bound


def test_bounded_division_by_interval_containing_zero():
    with pytest.raises(DomainError):
        BoundedValue(1, 0) / BoundedValue(mpmath.mpf("1e-10"), mpmath.mpf("1e-9"))


def test_matching_digits_and_agreement():
    with mpmath.workdps(40):
        a = BoundedValue(mpmath.pi, mpmath.mpf(10) ** -35)
        b = BoundedValue(mpmath.pi + mpmath.mpf(10) ** -20, 0)
        assert 19 <= a.matching_digits(b) <= 21
        assert not a.agrees_with(b)
        assert a.agrees_with(b, mpmath.mpf(10) ** -19)
