"""Numeric and exact checks of the reflection, cotangent and L-value identities.

Every check returns an :class:`IdentityReport`.  Numeric verdicts compare
``|lhs - rhs|`` against ``max(tolerance, combined error bounds)``; exact verdicts
compare cyclotomic elements coefficient by coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .cyclotomic import CyclotomicElement, embed_numeric, galois_apply, icot_exact
from .errors import ArgumentError, DivergentSeriesError, DomainError
from .numerics import BoundedValue, PrecisionBudget, _eps, to_mp
from .qzeta import QPoint, gamma0, parse_q
from .special import ResidueSystem, _check_pair, bernoulli_polynomial, cot_value, digamma


@dataclass(frozen=True)
class DeltaFunction:
    """The odd period-b function with +1 at a, -1 at b - a, and 0 elsewhere."""

    modulus: int
    residue: int

    def __post_init__(self):
        b, a = self.modulus, self.residue
        if b < 3 or not (1 <= a and 2 * a < b) or math.gcd(a, b) != 1:
            raise ArgumentError(f"need b >= 3, 1 <= a < b/2, gcd(a,b) = 1; got a={a}, b={b}")

    def __call__(self, n: int) -> int:
        r = n % self.modulus
        if r == self.residue:
            return 1
        if r == self.modulus - self.residue:
            return -1
        return 0

    def values(self) -> list[int]:
        """f(1), ..., f(b)."""
        return [self(d) for d in range(1, self.modulus + 1)]


@dataclass
class IdentityReport:
    name: str
    params: dict
    lhs: BoundedValue
    rhs: BoundedValue
    residual: BoundedValue
    tolerance: object
    verdict: bool
    exact_equal: bool | None = None
    notes: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.verdict else "fail"


def _numeric_report(name, params, lhs: BoundedValue, rhs: BoundedValue, tolerance, budget) -> IdentityReport:
    with budget.workdps():
        residual = lhs - rhs
        allowed = max(to_mp(tolerance), lhs.error_bound + rhs.error_bound)
        verdict = bool(abs(residual.value) <= allowed)
    return IdentityReport(name, params, lhs, rhs, residual, tolerance, verdict)


def _default_tolerance(budget: PrecisionBudget):
    return mpmath.power(10, -budget.target_digits)


def _half_pair(a: int, b: int) -> None:
    if not isinstance(a, int) or not isinstance(b, int) or b < 3 or not (1 <= a and 2 * a < b) or math.gcd(a, b) != 1:
        raise ArgumentError(f"need b >= 3, 1 <= a < b/2, gcd(a,b) = 1; got a={a}, b={b}")


# ---------------------------------------------------------------------------
# reflection identity for gamma0
# ---------------------------------------------------------------------------

def reflection_lhs(q, a: int, b: int, budget: PrecisionBudget) -> BoundedValue:
    """gamma0(q, a/b) - gamma0(q, 1 - a/b)."""
    _check_pair(a, b)
    qv, unc = parse_q(q)
    left = gamma0(QPoint(qv, Fraction(a, b), unc), budget)
    right = gamma0(QPoint(qv, Fraction(b - a, b), unc), budget)
    with budget.workdps():
        return left - right


REFLECTION_FORMS = ("printed", "corrected")


def reflection_correction(q, a: int, b: int, budget: PrecisionBudget) -> BoundedValue:
    """(4 pi (q-1)/log q) sum_{m>=1} sin(2 pi m a/b) / (exp(4 pi^2 m/log q) - 1).

    This is the exponentially small remainder that Poisson summation over the
    Lambert series of gamma0 leaves beside the cotangent term.  It is of size
    exp(-4 pi^2/log q): about 1e-24 at q = 2 and 1e-11 at q = 5.
    """
    qv, _ = parse_q(q)
    with budget.workdps():
        qm = to_mp(qv)
        logq = mpmath.log(qm)
        c = 4 * mpmath.pi**2 / logq
        x = mpmath.mpf(a) / b
        tol = to_mp(budget.tail_tolerance) * logq
        total = mpmath.mpf(0)
        m = 0
        while True:
            m += 1
            total += mpmath.sin(2 * mpmath.pi * m * x) / mpmath.expm1(c * m)
            # |sin| <= 1 and 1/(e^t - 1) <= e^-t/(1 - e^-c) for t >= c
            tail = mpmath.exp(-c * (m + 1)) / (1 - mpmath.exp(-c)) ** 2
            if tail <= tol:
                break
        scale = 4 * mpmath.pi * (qm - 1) / logq
        value = scale * total
        return BoundedValue(value, scale * tail + abs(value) * 16 * m * _eps())


def reflection_rhs(q, a: int, b: int, budget: PrecisionBudget, form: str = "printed") -> BoundedValue:
    """((q-1)/log q) pi cot(pi a/b) + (2q - 3)(1/2 - a/b).

    ``form="corrected"`` returns instead
    ((q-1)/log q) pi cot(pi a/b) + (q - 1)(1/2 - a/b) + reflection_correction,
    which is what the gamma0 closed form actually satisfies; the two agree only
    up to the exponential remainder at q = 2 and differ at order one elsewhere.
    """
    if form not in REFLECTION_FORMS:
        raise ArgumentError(f"unknown reflection form {form!r}")
    qv, _ = parse_q(q)
    if qv <= 1:
        raise DomainError("q must exceed 1")
    cot = cot_value(a, b, budget)
    correction = reflection_correction(qv, a, b, budget) if form == "corrected" else BoundedValue(0, 0)
    with budget.workdps():
        qm = to_mp(qv)
        scale = BoundedValue.rounded((qm - 1) / mpmath.log(qm) * mpmath.pi, 8)
        slope = 2 * qv - 3 if form == "printed" else qv - 1
        affine = slope * (Fraction(1, 2) - Fraction(a, b))
        return scale * cot + to_mp(affine) + correction


def verify_t2(q, a: int, b: int, budget: PrecisionBudget, tolerance=None, perturb=0,
              form: str = "printed") -> IdentityReport:
    """Check the reflection identity; ``perturb`` shifts the rhs (negative control)."""
    _half_pair(a, b)
    tolerance = _default_tolerance(budget) if tolerance is None else tolerance
    lhs = reflection_lhs(q, a, b, budget)
    rhs = reflection_rhs(q, a, b, budget, form)
    if perturb:
        with budget.workdps():
            rhs = rhs + to_mp(perturb)
    report = _numeric_report("t2", {"q": str(parse_q(q)[0]), "a": a, "b": b}, lhs, rhs, tolerance, budget)
    report.notes["form"] = form
    return report


# ---------------------------------------------------------------------------
# cotangent as a Bernoulli / root-of-unity sum
# ---------------------------------------------------------------------------

def bernoulli_fourier_sum(a: int, b: int) -> CyclotomicElement:
    """sum_{d=1}^{b} (zeta_b^{ad} - zeta_b^{-ad}) B_1(d/b), exactly; it equals -i cot(pi a/b)."""
    _check_pair(a, b)
    coeffs = [Fraction(0)] * b
    for d in range(1, b + 1):
        w = bernoulli_polynomial(1, Fraction(d, b))
        coeffs[(a * d) % b] += w
        coeffs[(-a * d) % b] -= w
    return CyclotomicElement.from_poly(b, coeffs)


def cot_bernoulli_sum(a: int, b: int) -> CyclotomicElement:
    """i * sum_{d=1}^{b} (zeta_b^{ad} - zeta_b^{-ad}) B_1(d/b), a real element equal to cot(pi a/b).

    i lies in Q(zeta_m) only when 4 | m, so the result lives at level lcm(b, 4).
    """
    level = b * 4 // math.gcd(b, 4)
    return CyclotomicElement.imaginary_unit(level) * bernoulli_fourier_sum(a, b).lift(level)


def delta_fourier(a: int, b: int, n: int) -> CyclotomicElement:
    """Fourier transform (1/b) sum_d delta_a(d) zeta_b^{dn}, summed term by term."""
    delta = DeltaFunction(b, a)
    coeffs = [Fraction(0)] * b
    for d in range(1, b + 1):
        coeffs[(d * n) % b] += Fraction(delta(d), b)
    return CyclotomicElement.from_poly(b, coeffs)


def verify_lemma31(a: int, b: int, budget: PrecisionBudget) -> IdentityReport:
    """cot(pi a/b) from the exact Bernoulli sum, numerically and exactly.

    Numeric: the embedded sum matches ``cot_value``.  Exact: minus the Bernoulli
    sum equals (1 + zeta^a)/(1 - zeta^a) in Q(zeta_b), i.e. both are i cot(pi a/b).
    """
    _check_pair(a, b)
    element = cot_bernoulli_sum(a, b)
    lhs = embed_numeric(element, budget)
    rhs = cot_value(a, b, budget)
    report = _numeric_report("lemma31", {"a": a, "b": b}, lhs.real, rhs, _default_tolerance(budget), budget)
    exact = -bernoulli_fourier_sum(a, b) == icot_exact(a, b)
    report.exact_equal = exact
    report.verdict = report.verdict and exact and abs(lhs.imag.value) <= lhs.error_bound
    report.notes["exact_element"] = str(element)
    return report


# ---------------------------------------------------------------------------
# L(1, f) for periodic f
# ---------------------------------------------------------------------------

def l_series_partial(f_values: Sequence[int], N: int) -> BoundedValue:
    """sum_{n<=N'} f(n)/n for a period-b f given as f(1..b), N' = b * floor(N/b).

    Refuses when sum f != 0, since the series then diverges.  Terms are grouped a
    full period at a time; the bound on the rest is sum_r |f(r)| r / (b^2 (K-1))
    with K = N' / b complete periods summed, plus float rounding.
    """
    b = len(f_values)
    if sum(f_values) != 0:
        raise DivergentSeriesError("sum of f over a period is non-zero, so sum f(n)/n diverges")
    if N < b:
        raise ArgumentError("need N >= period")
    periods = N // b
    k = np.arange(periods, dtype=np.float64) * b
    total = []
    for r, fr in enumerate(f_values, start=1):
        if fr:
            total.extend((fr / (k + r)).tolist())
    value = math.fsum(total)
    tail = sum(abs(fr) * r for r, fr in enumerate(f_values, start=1)) / (b * b * max(periods - 1, 1))
    rounding = len(total) * 2.0**-52 * max(1.0, abs(value)) * 4
    return BoundedValue(value, tail + rounding)


def l_delta_partial(a: int, b: int, N: int) -> BoundedValue:
    """sum_{n<=N} delta_a(n)/n, pairing the +1 and -1 terms of each period.

    After K complete periods the remainder is sum_{k>=K} (b-2a)/((kb+a)(kb+b-a)),
    which lies in [c/(K+1), c/K] with c = (b-2a)/b^2; the midpoint is added and
    half the bracket width kept as the bound.
    """
    delta = DeltaFunction(b, a)
    if N < b:
        raise ArgumentError("need N >= b")
    periods = N // b
    k = np.arange(periods, dtype=np.float64) * b
    pairs = (b - 2 * a) / ((k + a) * (k + b - a))
    partial = math.fsum(pairs.tolist())
    c = (b - 2 * a) / b**2
    lo, hi = c / (periods + 1), c / periods
    rounding = periods * 2.0**-52 * 8 * max(partial, 1.0)
    return BoundedValue(partial + (lo + hi) / 2, (hi - lo) / 2 + rounding)


def l_delta_digamma(a: int, b: int, budget: PrecisionBudget) -> BoundedValue:
    """L(1, delta_a) = -(1/b) sum_d delta_a(d) psi(d/b) = -(psi(a/b) - psi(1 - a/b)) / b."""
    _half_pair(a, b)
    with budget.workdps():
        diff = digamma(Fraction(a, b), budget) - digamma(Fraction(b - a, b), budget)
        return diff * to_mp(Fraction(-1, b))


def l_delta_fourier(a: int, b: int, budget: PrecisionBudget) -> BoundedValue:
    """L(1, delta_a) from the Bernoulli expansion: (pi i / b) sum_d (zeta^{ad} - zeta^{-ad}) B_1(d/b)."""
    _half_pair(a, b)
    s = embed_numeric(bernoulli_fourier_sum(a, b), budget)
    with budget.workdps():
        factor = BoundedValue.rounded(mpmath.mpc(0, mpmath.pi) / b)
        return (factor * s).real


def verify_lfunction(a: int, b: int, budget: PrecisionBudget, N: int = 10**6) -> list[IdentityReport]:
    """The triangle partial sums ~ digamma form = (pi/b) cot(pi a/b) = Bernoulli-Fourier form."""
    _half_pair(a, b)
    params = {"a": a, "b": b}
    partial = l_delta_partial(a, b, N)
    via_digamma = l_delta_digamma(a, b, budget)
    via_fourier = l_delta_fourier(a, b, budget)
    with budget.workdps():
        via_cot = cot_value(a, b, budget) * BoundedValue.rounded(mpmath.pi / b)
    tol = _default_tolerance(budget)
    return [
        _numeric_report("lfunction:partial-vs-digamma", dict(params, N=N), partial, via_digamma, 1e-6, budget),
        _numeric_report("lfunction:digamma-vs-cot", params, via_digamma, via_cot, tol, budget),
        _numeric_report("lfunction:fourier-vs-cot", params, via_fourier, via_cot, tol, budget),
    ]


# ---------------------------------------------------------------------------
# kappa_a and its Galois orbit
# ---------------------------------------------------------------------------

def _rational_q(q) -> Fraction:
    qv, unc = parse_q(q)
    if unc:
        raise ArgumentError("kappa needs an exact rational q")
    if qv <= 1:
        raise DomainError("q must exceed 1")
    return qv


def kappa_exact(q, a: int, b: int) -> CyclotomicElement:
    """-(q-1)(1 + zeta_b^a)/(1 - zeta_b^a); any a coprime to b."""
    qv = _rational_q(q)
    return icot_exact(a, b) * (-(qv - 1))


def kappa(q, a: int, b: int, budget: PrecisionBudget, form: str = "printed") -> tuple[BoundedValue, CyclotomicElement]:
    """kappa_a = (log q / (i pi)) [reflection difference - (2q-3)(1/2 - a/b)] and its exact candidate.

    ``form="corrected"`` subtracts the affine and exponential parts of the
    corrected reflection formula instead (see :func:`reflection_rhs`).
    """
    _half_pair(a, b)
    if form not in REFLECTION_FORMS:
        raise ArgumentError(f"unknown reflection form {form!r}")
    qv = _rational_q(q)
    lhs = reflection_lhs(qv, a, b, budget)
    correction = reflection_correction(qv, a, b, budget) if form == "corrected" else BoundedValue(0, 0)
    with budget.workdps():
        slope = 2 * qv - 3 if form == "printed" else qv - 1
        core = lhs - to_mp(slope * (Fraction(1, 2) - Fraction(a, b))) - correction
        factor = BoundedValue.rounded(mpmath.log(to_mp(qv)) / mpmath.mpc(0, mpmath.pi), 8)
        numeric = factor * core
    return numeric, kappa_exact(qv, a, b)


def verify_kappa(q, a: int, b: int, budget: PrecisionBudget, form: str = "printed") -> IdentityReport:
    numeric, exact = kappa(q, a, b, budget, form)
    embedded = embed_numeric(exact, budget)
    report = _numeric_report("kappa", {"q": str(_rational_q(q)), "a": a, "b": b}, numeric, embedded,
                             _default_tolerance(budget), budget)
    report.notes["exact_candidate"] = str(exact)
    report.notes["form"] = form
    return report


def galois_orbit_check(q, b: int, budget: PrecisionBudget | None = None) -> list[IdentityReport]:
    """sigma_r(kappa_a) == sign * kappa_c with c = a r mod b folded into the half system.

    Exact comparison for every a in the half system and every r coprime to b.
    """
    budget = budget or PrecisionBudget(30)
    qv = _rational_q(q)
    system = ResidueSystem.of(b)
    kappas = {a: kappa_exact(qv, a, b) for a in system.half_system}
    reports = []
    for a in system.half_system:
        for r in system.full_system:
            image = galois_apply(r, kappas[a])
            c, sign = system.fold(a * r)
            target = kappas[c] * sign
            exact = image == target
            lhs = embed_numeric(image, budget)
            rhs = embed_numeric(target, budget)
            rep = _numeric_report("galois", {"q": str(qv), "b": b, "a": a, "r": r, "image": c, "sign": sign},
                                  lhs, rhs, 0, budget)
            rep.exact_equal = exact
            rep.verdict = exact
            reports.append(rep)
    return reports
