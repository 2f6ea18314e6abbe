"""Exact arithmetic in the cyclotomic field Q(zeta_b).

Elements are stored as rational coefficient vectors of length phi(b) in the power
basis 1, z, ..., z^(phi(b)-1), reduced modulo the b-th cyclotomic polynomial, so
equality of elements is equality of vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath

from .errors import ArgumentError, DomainError
from .numerics import BoundedValue, PrecisionBudget, _eps, to_mp
from .special import _check_pair


def _poly_divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    """Polynomial long division over Q; coefficient lists run from low to high degree."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / lead
        quot[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    rem = num[: len(den) - 1]
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(b: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_b, low degree first.

    Obtained by exact division of x^b - 1 by Phi_d for every proper divisor d.
    """
    if b < 1:
        raise ArgumentError("cyclotomic level must be positive")
    poly = [Fraction(-1)] + [Fraction(0)] * (b - 1) + [Fraction(1)]
    for d in range(1, b):
        if b % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic_polynomial(d))
            assert not rem
    return tuple(int(c) for c in poly)


@lru_cache(maxsize=None)
def _power_table(b: int) -> tuple[tuple[Fraction, ...], ...]:
    """Reductions of x^k mod Phi_b for 0 <= k < b."""
    phi = len(cyclotomic_polynomial(b)) - 1
    table = []
    for k in range(b):
        mono = [0] * k + [1]
        _, rem = _poly_divmod(mono, cyclotomic_polynomial(b))
        table.append(tuple(rem + [Fraction(0)] * (phi - len(rem))))
    return tuple(table)


def _reduce_exponents(level: int, terms: Iterable[tuple[int, Fraction]]) -> tuple[Fraction, ...]:
    table = _power_table(level)
    phi = len(table[0])
    acc = [Fraction(0)] * phi
    for exponent, coeff in terms:
        if not coeff:
            continue
        for i, t in enumerate(table[exponent % level]):
            if t:
                acc[i] += coeff * t
    return tuple(acc)


@dataclass(frozen=True)
class CyclotomicElement:
    """An element of Q(zeta_level) in reduced power-basis form."""

    level: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        phi = len(cyclotomic_polynomial(self.level)) - 1
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if len(coeffs) != phi:
            raise ArgumentError(f"level {self.level} needs {phi} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_poly(cls, level: int, coeffs: Sequence) -> "CyclotomicElement":
        """Reduce an arbitrary polynomial in zeta_level (low degree first)."""
        return cls(level, _reduce_exponents(level, ((k, Fraction(c)) for k, c in enumerate(coeffs))))

    @classmethod
    def rational(cls, level: int, value) -> "CyclotomicElement":
        return cls.from_poly(level, [Fraction(value)])

    @classmethod
    def zeta(cls, level: int, power: int = 1) -> "CyclotomicElement":
        """zeta_level ** power (negative powers allowed)."""
        return cls(level, _reduce_exponents(level, [(power % level, Fraction(1))]))

    @classmethod
    def imaginary_unit(cls, level: int) -> "CyclotomicElement":
        if level % 4:
            raise ArgumentError(f"i is not in Q(zeta_{level}) unless 4 divides the level")
        return cls.zeta(level, level // 4)

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "CyclotomicElement") -> None:
        if self.level != other.level:
            raise ArgumentError(f"level mismatch: {self.level} vs {other.level}")

    def _lift_scalar(self, other) -> "CyclotomicElement":
        if isinstance(other, CyclotomicElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement.rational(self.level, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift_scalar(other)
        if o is NotImplemented:
            return o
        return CyclotomicElement(self.level, tuple(x + y for x, y in zip(self.coefficients, o.coefficients)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.level, tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        o = self._lift_scalar(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.level, tuple(c * other for c in self.coefficients))
        o = self._lift_scalar(other)
        if o is NotImplemented:
            return o
        prod: dict[int, Fraction] = {}
        for i, x in enumerate(self.coefficients):
            if not x:
                continue
            for j, y in enumerate(o.coefficients):
                if y:
                    prod[i + j] = prod.get(i + j, Fraction(0)) + x * y
        return CyclotomicElement(self.level, _reduce_exponents(self.level, prod.items()))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicElement":
        """Multiplicative inverse via the extended Euclidean algorithm against Phi_b."""
        if self.is_zero():
            raise DomainError("zero has no inverse in Q(zeta_b)")
        # invariant: r_i = s_i * u (mod Phi)
        r0, r1 = [Fraction(c) for c in cyclotomic_polynomial(self.level)], _trim(list(self.coefficients))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            quot, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, _trim(rem) or [Fraction(0)]
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1))
            if r1 == [Fraction(0)]:
                raise DomainError("element is a zero divisor")  # cannot happen in a field
        const = r1[0]
        return CyclotomicElement.from_poly(self.level, [c / const for c in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DomainError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        o = self._lift_scalar(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift_scalar(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CyclotomicElement.rational(self.level, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def lift(self, level: int) -> "CyclotomicElement":
        """The same number viewed in Q(zeta_level), where level is a multiple of self.level."""
        if level % self.level:
            raise ArgumentError(f"{level} is not a multiple of {self.level}")
        step = level // self.level
        return CyclotomicElement(level, _reduce_exponents(level, ((i * step, c) for i, c in enumerate(self.coefficients))))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coefficients):
            if c:
                mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) or "0"


def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p: Sequence, q: Sequence) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _poly_sub(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)]


def cyclotomic_add(u: CyclotomicElement, v: CyclotomicElement) -> CyclotomicElement:
    u._check(v)
    return u + v


def cyclotomic_mul(u: CyclotomicElement, v: CyclotomicElement) -> CyclotomicElement:
    u._check(v)
    return u * v


def cyclotomic_inv(u: CyclotomicElement) -> CyclotomicElement:
    return u.inverse()


def icot_exact(a: int, b: int) -> CyclotomicElement:
    """(1 + zeta_b^a) / (1 - zeta_b^a), which is i*cot(pi a/b)."""
    _check_pair(a, b)
    z = CyclotomicElement.zeta(b, a)
    return (1 + z) / (1 - z)


def galois_apply(r: int, u: CyclotomicElement) -> CyclotomicElement:
    """The automorphism sigma_r: zeta_b -> zeta_b^r."""
    b = u.level
    if math.gcd(r, b) != 1:
        raise ArgumentError(f"gcd({r}, {b}) != 1, sigma_r is not an automorphism")
    return CyclotomicElement(b, _reduce_exponents(b, ((i * r, c) for i, c in enumerate(u.coefficients))))


def embed_numeric(u: CyclotomicElement, budget: PrecisionBudget) -> BoundedValue:
    """Evaluate u at zeta_b = exp(2 pi i / b)."""
    b = u.level
    with budget.workdps():
        total = mpmath.mpc(0)
        weight = mpmath.mpf(0)
        for k, c in enumerate(u.coefficients):
            if c:
                cm = to_mp(c)
                total += cm * mpmath.expjpi(mpmath.mpf(2 * k) / b)
                weight += abs(cm) * (k + 4)
        return BoundedValue(total, weight * 16 * _eps())
