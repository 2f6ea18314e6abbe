"""Precision management, bounded values, certified summation and extrapolation.

Every analytic routine in the package takes a :class:`PrecisionBudget` and returns
a :class:`BoundedValue`, i.e. an mpmath number together with an absolute error
bound.  Error propagation is first order: bounds add under addition, and the usual
``|a| eb + |b| ea + ea eb`` rule is used for products.  Rounding at the working
precision is charged as a few ulps per operation, which the guard digits absorb.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import mpmath
from mpmath import mp

from .errors import ArgumentError, DomainError, EvaluationError

Number = Any  # mpf | mpc | int | Fraction


def _eps() -> Any:
    return mpmath.ldexp(mpmath.mpf(1), 1 - mp.prec)


def to_mp(value: Number) -> Any:
    """Convert ints, Fractions, strings and mpmath numbers at the current precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return +value
    if isinstance(value, complex):
        return mpmath.mpc(value)
    return mpmath.mpf(value)


@dataclass(frozen=True)
class PrecisionBudget:
    """How accurately a value is wanted and how much extra precision to carry.

    ``tail_tolerance`` is the absolute truncation allowance for series; it defaults
    to ``10**-(target_digits + guard_digits // 2)``.
    """

    target_digits: int
    guard_digits: int = 20
    tail_tolerance: Any = None

    def __post_init__(self):
        if int(self.target_digits) != self.target_digits or self.target_digits < 1:
            raise ArgumentError("target_digits must be a positive integer")
        if self.guard_digits < 0:
            raise ArgumentError("guard_digits must be non-negative")
        if self.tail_tolerance is None:
            tol = mpmath.power(10, -(self.target_digits + self.guard_digits // 2))
            object.__setattr__(self, "tail_tolerance", tol)
        elif not self.tail_tolerance > 0:
            raise ArgumentError("tail_tolerance must be positive")

    @property
    def working_digits(self) -> int:
        return self.target_digits + self.guard_digits

    def workdps(self, extra: int = 0):
        """Context manager that sets mpmath to the working precision (plus ``extra``)."""
        return mpmath.workdps(self.working_digits + extra)

    def with_target(self, digits: int) -> "PrecisionBudget":
        return PrecisionBudget(digits, self.guard_digits)

    def accuracy(self, value: Number = 0) -> Any:
        """The error allowance ``10**-target * max(1, |value|)``."""
        return mpmath.power(10, -self.target_digits) * max(1, abs(to_mp(value)))


@dataclass(frozen=True)
class BoundedValue:
    """A real or complex number with a conservative absolute error bound."""

    value: Any
    error_bound: Any = field(default_factory=lambda: mpmath.mpf(0))

    def __post_init__(self):
        # mpmath numbers are stored as given: re-rounding them here would silently
        # drop bits whenever a value is wrapped outside its working precision
        if not isinstance(self.value, (mpmath.mpf, mpmath.mpc)):
            object.__setattr__(self, "value", to_mp(self.value))
        eb = self.error_bound if isinstance(self.error_bound, mpmath.mpf) else to_mp(self.error_bound)
        if isinstance(eb, mpmath.mpc) or not mpmath.isfinite(eb) or eb < 0:
            raise EvaluationError(f"invalid error bound {eb!r}")
        if not mpmath.isfinite(self.value):
            raise EvaluationError(f"non-finite value {self.value!r}")
        object.__setattr__(self, "error_bound", eb)

    @classmethod
    def rounded(cls, value: Number, ulps: int = 4) -> "BoundedValue":
        """A freshly computed value charged ``ulps`` units of rounding at current precision."""
        v = to_mp(value)
        return cls(v, abs(v) * _eps() * ulps)

    @staticmethod
    def coerce(other: Any) -> "BoundedValue":
        if isinstance(other, BoundedValue):
            return other
        return BoundedValue(to_mp(other), 0)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self.coerce(other)
        v = self.value + o.value
        return BoundedValue(v, self.error_bound + o.error_bound + abs(v) * _eps())

    __radd__ = __add__

    def __neg__(self):
        return BoundedValue(-self.value, self.error_bound)

    def __sub__(self, other):
        return self + (-self.coerce(other))

    def __rsub__(self, other):
        return self.coerce(other) - self

    def __mul__(self, other):
        o = self.coerce(other)
        v = self.value * o.value
        eb = (
            abs(self.value) * o.error_bound
            + abs(o.value) * self.error_bound
            + self.error_bound * o.error_bound
            + abs(v) * _eps()
        )
        return BoundedValue(v, eb)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self.coerce(other)
        denom = abs(o.value) - o.error_bound
        if denom <= 0:
            raise DomainError("division by a value whose enclosure contains zero")
        v = self.value / o.value
        eb = (self.error_bound + abs(v) * o.error_bound) / denom + abs(v) * _eps()
        return BoundedValue(v, eb)

    def __rtruediv__(self, other):
        return self.coerce(other) / self

    def __abs__(self):
        return BoundedValue(abs(self.value), self.error_bound)

    # -- queries ---------------------------------------------------------
    @property
    def real(self) -> "BoundedValue":
        return BoundedValue(mpmath.re(self.value), self.error_bound)

    @property
    def imag(self) -> "BoundedValue":
        return BoundedValue(mpmath.im(self.value), self.error_bound)

    def upper_abs(self) -> Any:
        return abs(self.value) + self.error_bound

    def contains(self, x: Number) -> bool:
        return abs(self.value - to_mp(x)) <= self.error_bound

    def agrees_with(self, other: Any, tolerance: Number = 0) -> bool:
        """True when the two enclosures are compatible, with an optional extra slack."""
        o = self.coerce(other)
        return abs(self.value - o.value) <= self.error_bound + o.error_bound + to_mp(tolerance)

    def matching_digits(self, other: Any) -> float:
        """Number of significant decimal digits on which the two central values agree."""
        o = self.coerce(other)
        diff = abs(self.value - o.value)
        scale = max(abs(self.value), abs(o.value), mpmath.mpf("1e-300"))
        if diff == 0:
            return float("inf")
        return float(-mpmath.log10(diff / scale))

    def relative_error(self) -> Any:
        if self.value == 0:
            return mpmath.inf if self.error_bound else mpmath.mpf(0)
        return self.error_bound / abs(self.value)

    def __repr__(self):
        return f"BoundedValue({mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.error_bound, 3)})"


def sum_geometric_tail(
    term: Callable[[int], Number],
    ratio_bound: Number,
    budget: PrecisionBudget,
    start: int = 1,
    ratio_from: int | None = None,
    max_terms: int = 10_000_000,
) -> BoundedValue:
    """Sum ``term(n)`` for ``n >= start`` with a certified truncation bound.

    The caller guarantees ``|t(n+1)| <= ratio_bound * |t(n)|`` for every
    ``n >= ratio_from`` (default ``start``).  Summation stops at the first index N
    past ``ratio_from`` with ``|t(N)| r / (1 - r) <= budget.tail_tolerance``; that
    quantity bounds the discarded remainder.
    """
    if ratio_from is None:
        ratio_from = start
    with budget.workdps():
        r = to_mp(ratio_bound)
        if isinstance(r, mpmath.mpc):
            raise ArgumentError("ratio_bound must be real")
        if r >= 1:
            raise DomainError(f"ratio bound {mpmath.nstr(r, 8)} does not certify convergence")
        if r < 0:
            raise ArgumentError("ratio_bound must be non-negative")
        tol = to_mp(budget.tail_tolerance)
        total = mpmath.mpf(0)
        abs_total = mpmath.mpf(0)
        n = start
        count = 0
        while True:
            t = term(n)
            if not mpmath.isfinite(t):
                raise EvaluationError(f"non-finite term at index {n}")
            total += t
            at = abs(t)
            abs_total += at
            count += 1
            if n >= ratio_from:
                tail = at * r / (1 - r)
                if tail <= tol:
                    break
            if count >= max_terms:
                raise EvaluationError(f"series did not reach tolerance within {max_terms} terms")
            n += 1
        rounding = (count + 8) * _eps() * abs_total
        return BoundedValue(total, tail + rounding)


def richardson_limit(samples: Sequence[tuple[Number, Any]], order: int) -> BoundedValue:
    """Extrapolate ``v(h) -> v(0)`` from samples on dyadically halving steps.

    Assumes ``v(h) = L + c1 h + c2 h^2 + ...``.  Values may be plain numbers or
    :class:`BoundedValue`; input error bounds are pushed through the tableau with
    absolute weights.  The returned bound adds the last extrapolation increment
    (same column when available, otherwise the previous column) to that
    propagated noise, so it is an estimate rather than a proof.
    """
    if order < 1:
        raise ArgumentError("order must be a positive integer")
    if len(samples) < order + 1:
        raise ArgumentError(f"need at least {order + 1} samples for order {order}, got {len(samples)}")
    hs = [to_mp(h) for h, _ in samples]
    for h0, h1 in zip(hs, hs[1:]):
        if not h1 > 0 or abs(h0 - 2 * h1) > abs(h0) * mpmath.mpf(10) ** (-(mp.dps - 5)):
            raise ArgumentError("steps must be positive and halve at each sample")
    bvs = [BoundedValue.coerce(v) for _, v in samples]
    col = [b.value for b in bvs]
    err = [b.error_bound for b in bvs]
    prev_col = col
    weight_sum = mpmath.mpf(1)
    for m in range(1, order + 1):
        f = mpmath.mpf(2) ** m
        prev_col = col
        col = [(f * col[i + 1] - col[i]) / (f - 1) for i in range(len(col) - 1)]
        err = [(f * err[i + 1] + err[i]) / (f - 1) for i in range(len(err) - 1)]
        weight_sum *= (f + 1) / (f - 1)
    best = col[-1]
    if len(col) >= 2:
        increment = abs(col[-1] - col[-2])
    else:
        increment = abs(col[-1] - prev_col[-1])
    max_abs = max(abs(b.value) for b in bvs)
    rounding = weight_sum * (order + 2) * _eps() * max_abs
    return BoundedValue(best, increment + err[-1] + rounding)
