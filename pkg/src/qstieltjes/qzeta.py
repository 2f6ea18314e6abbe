"""q-brackets, the q-Hurwitz zeta function and its first Laurent coefficients at s = 1.

For q > 1 and x > 0::

    zeta_q(s, x) = sum_{n>=0} q^(n+x) / [n+x]_q^s,      [a]_q = (q^a - 1)/(q - 1)

has a simple pole at s = 1 with residue (q-1)/log q.  ``gamma0`` and ``gamma1``
evaluate the closed forms of the next two Laurent coefficients, and
``extract_laurent`` recovers the same three numbers independently by sampling
zeta_q on s = 1 + h and extrapolating h -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, Callable

import mpmath

from .errors import ArgumentError, DomainError, InsufficientPrecisionError
from .numerics import BoundedValue, PrecisionBudget, _eps, richardson_limit, sum_geometric_tail, to_mp
from .special import as_fraction


def parse_q(text) -> tuple[Fraction, Fraction]:
    """Parse q as ``"p/r"``, an integer, or a decimal literal.

    Returns ``(q, uncertainty)``; a decimal literal with d digits after the point
    is taken as exact to half a unit in its last place.
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text), Fraction(0)
    text = str(text).strip()
    if "/" in text:
        try:
            return Fraction(text), Fraction(0)
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"cannot parse q={text!r}") from exc
    try:
        dec = Decimal(text)
    except InvalidOperation as exc:
        raise ArgumentError(f"cannot parse q={text!r}") from exc
    if not dec.is_finite():
        raise ArgumentError(f"cannot parse q={text!r}")
    exponent = dec.as_tuple().exponent
    value = Fraction(dec)
    if exponent >= 0:
        return value, Fraction(0)
    return value, Fraction(1, 2 * 10 ** (-exponent))


@dataclass(frozen=True)
class QPoint:
    """The parameter pair (q, x) with q > 1 and x > 0, both held exactly."""

    q: Fraction
    x: Fraction
    q_uncertainty: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "q", as_fraction(self.q))
        object.__setattr__(self, "x", as_fraction(self.x))
        if self.q <= 1:
            raise DomainError("q must exceed 1")
        if self.x <= 0:
            raise DomainError("x must be positive")
        if self.q_uncertainty < 0 or self.q - self.q_uncertainty <= 1:
            raise DomainError("q uncertainty interval must stay above 1")

    @classmethod
    def parse(cls, q, x) -> "QPoint":
        qv, unc = parse_q(q)
        return cls(qv, as_fraction(x), unc)

    @classmethod
    def from_pair(cls, q, a: int, b: int) -> "QPoint":
        if b < 1 or not (1 <= a <= b) or math.gcd(a, b) != 1:
            raise ArgumentError(f"need coprime 1 <= a <= b, got a={a}, b={b}")
        qv, unc = parse_q(q)
        return cls(qv, Fraction(a, b), unc)

    @property
    def is_exact(self) -> bool:
        return self.q_uncertainty == 0


@dataclass(frozen=True)
class LaurentData:
    residue: BoundedValue
    gamma0: BoundedValue
    gamma1: BoundedValue
    source: str  # "closed_form" or "extrapolated"


def _fold_q_uncertainty(fn: Callable[[QPoint, PrecisionBudget], BoundedValue], point: QPoint, budget):
    """Evaluate at the central q; widen the bound by the spread over q +- uncertainty."""
    centre = fn(point, budget)
    if point.is_exact:
        return centre
    lo = fn(replace(point, q=point.q - point.q_uncertainty, q_uncertainty=Fraction(0)), budget)
    hi = fn(replace(point, q=point.q + point.q_uncertainty, q_uncertainty=Fraction(0)), budget)
    with budget.workdps():
        spread = max(abs(hi.value - centre.value), abs(lo.value - centre.value))
        return BoundedValue(centre.value, centre.error_bound + 2 * spread + lo.error_bound + hi.error_bound)


def _check_closed_form_x(point: QPoint) -> None:
    if point.x > 1:
        raise DomainError("closed forms are implemented for 0 < x <= 1")


# ---------------------------------------------------------------------------
# q-series notation
# ---------------------------------------------------------------------------

def q_bracket_exact(n: int, q) -> Fraction:
    """[n]_q for a non-negative integer n and rational q, exactly."""
    q = as_fraction(q)
    if q == 1:
        raise DomainError("q-bracket is undefined at q = 1")
    if not isinstance(n, int) or n < 0:
        raise ArgumentError("exact q-bracket needs a non-negative integer n")
    return (q**n - 1) / (q - 1)


def q_bracket(a, q, budget: PrecisionBudget | None = None) -> BoundedValue:
    """[a]_q = (q^a - 1)/(q - 1)."""
    budget = budget or PrecisionBudget(30)
    if isinstance(q, (int, Fraction, str)) and as_fraction(q) == 1:
        raise DomainError("q-bracket is undefined at q = 1")
    with budget.workdps():
        if isinstance(a, int) and a >= 0 and isinstance(q, (int, Fraction, str)):
            return BoundedValue.rounded(to_mp(q_bracket_exact(a, as_fraction(q))), 1)
        qm = to_mp(as_fraction(q) if isinstance(q, str) else q)
        if qm == 1:
            raise DomainError("q-bracket is undefined at q = 1")
        am = to_mp(as_fraction(a) if isinstance(a, str) else a)
        num = mpmath.power(qm, am) - 1
        val = num / (qm - 1)
        cond = abs(am * mpmath.log(qm) * mpmath.power(qm, am)) / max(abs(num), _eps())
        return BoundedValue(val, abs(val) * _eps() * (8 + 4 * cond))


def q_shifted_factorial(a, q, n, budget: PrecisionBudget) -> BoundedValue:
    """(a; q)_n = prod_{m<n} (1 - a q^m); pass ``n=math.inf`` for the infinite product (|q| < 1)."""
    with budget.workdps():
        am = to_mp(as_fraction(a) if isinstance(a, str) else a)
        qm = to_mp(as_fraction(q) if isinstance(q, str) else q)
        if n != math.inf:
            if not isinstance(n, int) or n < 0:
                raise ArgumentError("n must be a non-negative integer or math.inf")
            prod = mpmath.mpf(1)
            for m in range(n):
                prod *= 1 - am * qm**m
            return BoundedValue(prod, abs(prod) * _eps() * (4 * n + 2) + _eps() * 4 * n)
        if abs(qm) >= 1:
            raise DomainError("the infinite q-shifted factorial needs |q| < 1")
        tol = to_mp(budget.tail_tolerance)
        aq, absq, abs_a = am, abs(qm), abs(am)
        prod = mpmath.mpf(1)
        m = 0
        while True:
            prod *= 1 - aq
            aq *= qm
            m += 1
            # once |a q^m| <= 1/2: |log(1 - z)| <= 2|z|, so the remaining factors lie
            # within exp(2 |a| |q|^m / (1 - |q|)) - 1 of 1 in relative terms
            tail_z = abs_a * absq**m
            if tail_z <= 0.5:
                eta = mpmath.expm1(2 * tail_z / (1 - absq))
                if abs(prod) * eta <= tol:
                    break
            if m > 10_000_000:
                raise InsufficientPrecisionError("infinite product did not converge")
        return BoundedValue(prod, abs(prod) * (eta + (4 * m + 2) * _eps()))


def lambert_q(s, x, q, budget: PrecisionBudget) -> BoundedValue:
    """The q-Lambert series sum_{k>=1} k^s q^(kx) / (1 - q^k) for |q| < 1 and x > 0."""
    with budget.workdps():
        sm = to_mp(s)
        xm = to_mp(as_fraction(x) if isinstance(x, str) else x)
        qm = to_mp(as_fraction(q) if isinstance(q, str) else q)
        if abs(qm) >= 1:
            raise DomainError("the Lambert series needs |q| < 1")
        if not xm > 0:
            raise DomainError("the Lambert series needs x > 0")
        if qm == 0:
            return BoundedValue(0, 0)
        absq = abs(qm)
        qx = absq**xm
        sigma = max(mpmath.re(sm), 0)
        target = (1 + qx) / 2

        def ratio(k):
            return ((k + 1) / mpmath.mpf(k)) ** sigma * qx * (1 + absq**k) / (1 - absq ** (k + 1))

        k0 = 1
        while ratio(k0) > target:
            k0 += 1
        r = ratio(k0)

    def term(k):
        return mpmath.power(k, sm) * mpmath.power(qm, k * xm) / (1 - qm**k)

    return sum_geometric_tail(term, r, budget, start=1, ratio_from=k0)


# ---------------------------------------------------------------------------
# zeta_q(s, x)
# ---------------------------------------------------------------------------

def _direct_terms_bound(sigma, q, digits) -> float:
    return float(digits * mpmath.log(10) / ((sigma - 1) * mpmath.log(q)))


def zeta_q(s, point: QPoint, budget: PrecisionBudget, method: str = "auto") -> BoundedValue:
    """zeta_q(s, x) for Re(s) > 1.

    ``method="direct"`` sums the defining series with the ratio certificate
    q^(1 - Re s).  ``method="split"`` sums a few terms directly and expands the
    remaining ones binomially in q^-(n+x), which turns the slowly decaying tail into
    a sum of geometric series that converges like q^-(x+N)k; this is what makes
    evaluation close to s = 1 practical.  ``"auto"`` picks direct only when it
    needs few terms.
    """
    if method not in ("auto", "direct", "split"):
        raise ArgumentError(f"unknown method {method!r}")
    with budget.workdps():
        sm = to_mp(s)
        if not mpmath.re(sm) > 1:
            raise DomainError("zeta_q needs Re(s) > 1; the series diverges otherwise")
    return _fold_q_uncertainty(lambda p, bud: _zeta_q_exact(sm, p, bud, method), point, budget)


def _zeta_term(sm, qm, e, logq, logq1):
    # (q-1)^s q^e / (q^e - 1)^s evaluated through logs to keep s complex-safe
    return mpmath.exp(sm * logq1 + e * logq - sm * mpmath.log(mpmath.expm1(e * logq)))


def _zeta_q_exact(sm, point: QPoint, budget: PrecisionBudget, method: str) -> BoundedValue:
    with budget.workdps():
        qm, xm = to_mp(point.q), to_mp(point.x)
        logq = mpmath.log(qm)
        logq1 = mpmath.log(qm - 1)
        sigma = mpmath.re(sm)
        if method == "auto":
            method = "direct" if _direct_terms_bound(sigma, qm, budget.working_digits) < 400 else "split"
        rel = lambda e: _eps() * 16 * (abs(sm) + 2) * (abs(e * logq) + abs(logq1) + 4)

    if method == "direct":
        with budget.workdps():
            r = qm ** (1 - sigma)
            worst = [mpmath.mpf(0)]

        def term(n):
            e = n + xm
            t = _zeta_term(sm, qm, e, logq, logq1)
            worst[0] += abs(t) * rel(e)
            return t

        total = sum_geometric_tail(term, r, budget, start=0)
        return BoundedValue(total.value, total.error_bound + worst[0])

    with budget.workdps():
        n_direct = max(0, math.ceil(math.log(64) / math.log(float(point.q))))
        head = mpmath.mpc(0) if isinstance(sm, mpmath.mpc) else mpmath.mpf(0)
        head_err = mpmath.mpf(0)
        for n in range(n_direct):
            e = n + xm
            t = _zeta_term(sm, qm, e, logq, logq1)
            head += t
            head_err += abs(t) * rel(e)
        big_x = xm + n_direct
        qmx = mpmath.power(qm, -big_x)
        abs_s = abs(sm)

        def ratio(k):
            return (abs_s + k) / (k + 1) * qmx * (1 + qm ** -(sigma + k - 1)) / (1 - qm ** -(sigma + k))

        k0 = 0
        while ratio(k0) > 0.5:
            k0 += 1
            if k0 > 100_000:
                raise InsufficientPrecisionError("no ratio certificate for the binomial tail")
        r = ratio(k0)
        state = {"k": 0, "binom": mpmath.mpf(1)}

    def tail_term(k):
        # binomial(s+k-1, k), updated incrementally because k runs 0, 1, 2, ...
        if k != state["k"]:
            state["binom"] *= (sm + k - 1) / k
            state["k"] = k
        u = sm + k - 1
        return state["binom"] * mpmath.exp(-big_x * u * logq) / (-mpmath.expm1(-u * logq))

    tail = sum_geometric_tail(tail_term, r, budget, start=0, ratio_from=k0)
    with budget.workdps():
        prefactor = BoundedValue(mpmath.exp(sm * logq1), abs(mpmath.exp(sm * logq1)) * rel(0))
        return BoundedValue(head, head_err + abs(head) * _eps() * n_direct) + prefactor * tail


# ---------------------------------------------------------------------------
# closed forms of the Laurent coefficients
# ---------------------------------------------------------------------------

def _log_pair(point: QPoint):
    qm = to_mp(point.q)
    logq = BoundedValue.rounded(mpmath.log(qm))
    if point.q == 2:
        logq1 = BoundedValue(0, 0)
    else:
        logq1 = BoundedValue.rounded(mpmath.log(qm - 1))
    return qm, logq, logq1


def _reciprocal_bracket_series(point: QPoint, budget: PrecisionBudget) -> BoundedValue:
    """sum_{n>=1} q^(n(1-x)) / [n]_q; consecutive terms shrink by at least q^-x."""
    with budget.workdps():
        qm, xm = to_mp(point.q), to_mp(point.x)
        r = qm ** (-xm)
        a = 1 - xm

    def term(n):
        return (qm - 1) * qm ** (n * a) / (qm**n - 1)

    return sum_geometric_tail(term, r, budget)


def _double_factor_series(point: QPoint, budget: PrecisionBudget) -> BoundedValue:
    """sum_{n>=1} (1 + (q^n - 1) x) q^(n(1-x)) / ([n]_q (q^n - 1)); ratio bound q^-x."""
    with budget.workdps():
        qm, xm = to_mp(point.q), to_mp(point.x)
        r = qm ** (-xm)
        a = 1 - xm

    def term(n):
        qn1 = qm**n - 1
        return (1 + qn1 * xm) * qm ** (n * a) * (qm - 1) / (qn1 * qn1)

    return sum_geometric_tail(term, r, budget)


def _harmonic_ratio_start(qx_inv):
    """Smallest n with q^-x (1 + 1/((n+1) H_n)) <= (1 + q^-x)/2, and that ratio."""
    target = (1 + qx_inv) / 2
    n, h = 1, mpmath.mpf(1)
    while True:
        r = qx_inv * (1 + 1 / ((n + 1) * h))
        if r <= target:
            return n, r
        n += 1
        h += mpmath.mpf(1) / n


def _stirling_series(point: QPoint, budget: PrecisionBudget, stirling_form: bool = True) -> BoundedValue:
    """sum_{n>=1} q^(n(1-x)) s(n+1,2) / (n! [n]_q), or the same with H_n in place of s(n+1,2)/n!."""
    with budget.workdps():
        qm, xm = to_mp(point.q), to_mp(point.x)
        n0, r = _harmonic_ratio_start(qm ** (-xm))
        a = 1 - xm
    # s(n+1,2) = n s(n,2) + (n-1)!  and  s(n+1,1) = n!
    state = {"n": 0, "fact": 1, "c2": 0, "h": mpmath.mpf(0)}

    def term(n):
        while state["n"] < n:
            m = state["n"] + 1
            state["c2"] = m * state["c2"] + state["fact"]
            state["fact"] *= m
            state["h"] += mpmath.mpf(1) / m
            state["n"] = m
        if stirling_form:
            weight = mpmath.mpf(state["c2"]) / mpmath.mpf(state["fact"])
        else:
            weight = state["h"]
        return weight * qm ** (n * a) * (qm - 1) / (qm**n - 1)

    return sum_geometric_tail(term, r, budget, start=1, ratio_from=n0)


def gamma0(point: QPoint, budget: PrecisionBudget) -> BoundedValue:
    """Constant term of zeta_q(s, x) at s = 1 from its closed form."""
    _check_closed_form_x(point)
    return _fold_q_uncertainty(_gamma0_exact, point, budget)


def _gamma0_exact(point: QPoint, budget: PrecisionBudget) -> BoundedValue:
    series = _reciprocal_bracket_series(point, budget)
    with budget.workdps():
        qm, logq, logq1 = _log_pair(point)
        q1 = to_mp(point.q - 1)
        one_minus_x = to_mp(1 - point.x)
        return series + q1 * logq1 / logq - q1 / 2 + q1 * one_minus_x


def gamma1(
    point: QPoint,
    budget: PrecisionBudget,
    halved_log_term: bool = True,
    stirling_form: bool = True,
) -> BoundedValue:
    """Linear Laurent coefficient from its closed form.

    The closed form is a log(q-1)-weighted bracket, a log q-weighted bracket and a
    Stirling-number series.  The first bracket carries (q-1) log(q-1) / (2 log q);
    ``halved_log_term=False`` evaluates the variant without the factor 1/2 (the
    Laurent oracle rejects it).  ``stirling_form=False`` swaps s(n+1,2)/n! for the
    harmonic number H_n, which is the same quantity.
    """
    _check_closed_form_x(point)
    return _fold_q_uncertainty(
        lambda p, bud: _gamma1_exact(p, bud, halved_log_term, stirling_form), point, budget
    )


def _gamma1_exact(point, budget, halved_log_term, stirling_form) -> BoundedValue:
    recip = _reciprocal_bracket_series(point, budget)
    double = _double_factor_series(point, budget)
    stirling = _stirling_series(point, budget, stirling_form)
    with budget.workdps():
        qm, logq, logq1 = _log_pair(point)
        q1 = to_mp(point.q - 1)
        xm = to_mp(point.x)
        coeff = q1 / 2 if halved_log_term else q1
        first = (recip + coeff * logq1 / logq - q1 / 2 + q1 * (1 - xm)) * logq1
        second = (q1 / 12 - double - q1 * (1 - xm) * xm / 2) * logq
        return first + second + stirling


def laurent_closed_form(point: QPoint, budget: PrecisionBudget, halved_log_term: bool = True) -> LaurentData:
    with budget.workdps():
        _, logq, _ = _log_pair(point)
        residue = to_mp(point.q - 1) / logq
    return LaurentData(residue, gamma0(point, budget), gamma1(point, budget, halved_log_term), "closed_form")


# ---------------------------------------------------------------------------
# Laurent extraction oracle
# ---------------------------------------------------------------------------

def _levels_needed(point: QPoint, digits: int, h0: float) -> int:
    # Taylor coefficients of zeta_q - R/(s-1) about s = 1 grow at most like rho^-k,
    # rho = min(1, 2 pi / log q) (nearest singularities at s = 0 and 1 + 2 pi i/log q)
    rho = 0.9 * min(1.0, 2 * math.pi / math.log(float(point.q)))
    if h0 >= rho:
        raise InsufficientPrecisionError("initial step exceeds the radius of convergence")
    lg = math.log10(h0 / rho)
    for levels in range(6, 200):
        extrapolation = (levels + 1) * lg - levels * (levels + 1) / 2 * math.log10(2)
        needed = -digits + math.log10(h0) - levels * math.log10(2) - 4
        if extrapolation <= needed:
            return levels
    raise InsufficientPrecisionError("too many extrapolation levels required")


def extract_laurent(point: QPoint, budget: PrecisionBudget, h0=Fraction(1, 4), levels: int | None = None) -> LaurentData:
    """Residue, gamma0 and gamma1 by Richardson extrapolation of zeta_q on s = 1 + h0 2^-j.

    Raises InsufficientPrecisionError when the resulting bounds do not meet the
    budget's target accuracy.
    """
    _check_closed_form_x(point)
    if not point.is_exact:
        raise ArgumentError("extract_laurent needs an exact rational q")
    h0 = as_fraction(h0)
    digits = budget.working_digits
    if levels is None:
        levels = _levels_needed(point, digits, float(h0))
    loss = math.ceil(2 * math.log10(2 ** levels / float(h0))) + 10
    inner = PrecisionBudget(digits + loss, guard_digits=10)
    with inner.workdps():
        hs = [to_mp(h0) / 2**j for j in range(levels + 1)]
        zetas = [_zeta_q_exact(1 + h, point, inner, "split") for h in hs]
        _, logq, _ = _log_pair(point)
        residue_exact = to_mp(point.q - 1) / logq
        res = richardson_limit([(h, z * h) for h, z in zip(hs, zetas)], levels)
        g = [z - residue_exact / h for h, z in zip(hs, zetas)]
        g0 = richardson_limit(list(zip(hs, g)), levels)
        d = [(gj - g0) / h for h, gj in zip(hs, g)]
        g1 = richardson_limit(list(zip(hs, d)), levels)
    for name, val in (("residue", res), ("gamma0", g0), ("gamma1", g1)):
        if val.error_bound > budget.accuracy(val.value):
            raise InsufficientPrecisionError(
                f"insufficient precision: {name} bound {mpmath.nstr(val.error_bound, 3)} "
                f"exceeds 1e-{budget.target_digits}"
            )
    return LaurentData(res, g0, g1, "extrapolated")
