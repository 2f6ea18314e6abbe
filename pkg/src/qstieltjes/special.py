"""Exact and numeric special functions: Bernoulli, Stirling, digamma, cotangent."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import ArgumentError, DomainError
from .numerics import BoundedValue, PrecisionBudget, _eps, to_mp

BERNOULLI_POLY_CAP = 60
STIRLING_CAP = 10_000
_BERNOULLI_NUMBER_CAP = 4000


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/r"`` strings exactly; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ArgumentError(f"expected an exact rational, got {type(x).__name__}")


@lru_cache(maxsize=8)
def _bernoulli_table(size: int) -> tuple[Fraction, ...]:
    # Akiyama-Tanigawa; yields B_1 = +1/2, flipped below.
    out = []
    row = [Fraction(0)] * (size + 1)
    for m in range(size + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    if size >= 1:
        out[1] = -out[1]
    return tuple(out)


def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n < 0 or n > _BERNOULLI_NUMBER_CAP:
        raise ArgumentError(f"Bernoulli index {n} out of range")
    size = 64
    while size < n:
        size *= 2
    return _bernoulli_table(size)[n]


def bernoulli_polynomial(k: int, x) -> Fraction:
    """Exact B_k(x) for rational x; B_1(x) = x - 1/2."""
    if not isinstance(k, int) or k < 0:
        raise ArgumentError("k must be a non-negative integer")
    if k > BERNOULLI_POLY_CAP:
        raise ArgumentError(f"k={k} exceeds the cap {BERNOULLI_POLY_CAP}")
    x = as_fraction(x)
    return sum((math.comb(k, j) * bernoulli_number(j) * x ** (k - j) for j in range(k + 1)), Fraction(0))


@lru_cache(maxsize=4096)
def stirling_first_unsigned(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind s(n+1, k).

    Built from c(1,1) = 1 and c(m+1,k) = c(m,k-1) + m c(m,k), so that
    ``stirling_first_unsigned(3, 2) == s(4, 2) == 11``.
    """
    if not (isinstance(n, int) and isinstance(k, int)):
        raise ArgumentError("n and k must be integers")
    if n < 0 or n > STIRLING_CAP or k < 1 or k > n + 1:
        raise ArgumentError(f"need 1 <= k <= n+1 and 0 <= n <= {STIRLING_CAP}, got n={n}, k={k}")
    row = [0, 1]  # c(1, 0..1)
    for m in range(1, n + 1):
        width = min(m + 1, k) + 1
        new = [0] * width
        for j in range(1, width):
            lower = row[j - 1] if j - 1 < len(row) else 0
            same = row[j] if j < len(row) else 0
            new[j] = lower + m * same
        row = new
    return row[k] if k < len(row) else 0


def totient(b: int) -> int:
    return sum(1 for a in range(1, b + 1) if math.gcd(a, b) == 1)


@dataclass(frozen=True)
class ResidueSystem:
    """Reduced residues mod b and the half system {a < b/2} representing the pairs {a, b-a}."""

    modulus: int
    half_system: tuple[int, ...]
    full_system: tuple[int, ...]

    @classmethod
    def of(cls, b: int) -> "ResidueSystem":
        if b < 3:
            raise ArgumentError("modulus must be at least 3")
        full = tuple(a for a in range(1, b) if math.gcd(a, b) == 1)
        half = tuple(a for a in full if 2 * a < b)
        return cls(b, half, full)

    def fold(self, c: int) -> tuple[int, int]:
        """Map a residue to (representative in half system, sign) using c ~ -(b - c)."""
        c %= self.modulus
        if 2 * c < self.modulus:
            return c, 1
        return self.modulus - c, -1


def _check_pair(a: int, b: int) -> None:
    if not (isinstance(a, int) and isinstance(b, int)):
        raise ArgumentError("a and b must be integers")
    if b != 0 and a % b == 0:
        raise DomainError(f"cot(pi*{a}/{b}) is a pole")
    if b < 3 or not (1 <= a < b):
        raise ArgumentError(f"need b >= 3 and 1 <= a < b, got a={a}, b={b}")
    if math.gcd(a, b) != 1:
        raise ArgumentError(f"gcd({a}, {b}) != 1")


def digamma(r, budget: PrecisionBudget) -> BoundedValue:
    """psi(r) for rational 0 < r <= 1 by upward shift and the asymptotic series.

    psi(r) = psi(r + M) - sum_{k<M} 1/(r+k), and for real z > 0
    psi(z) = log z - 1/(2z) - sum_{k=1}^{K} B_{2k} / (2k z^{2k}) + R_K
    where |R_K| is at most the first omitted term.
    """
    r = as_fraction(r)
    if r <= 0:
        raise DomainError("digamma has poles at the non-positive integers")
    if r > 1:
        raise ArgumentError("digamma argument must lie in (0, 1]")
    with budget.workdps():
        tol = mpmath.power(10, -(budget.working_digits + 2))
        shift = budget.working_digits + 10
        p, d = r.numerator, r.denominator
        recip = mpmath.mpf(0)
        for k in range(shift):
            recip += mpmath.mpf(d) / (p + k * d)
        z = mpmath.mpf(p + shift * d) / d
        z2 = z * z
        zpow = z2
        series = mpmath.mpf(0)
        k = 1
        while True:
            term = to_mp(bernoulli_number(2 * k)) / (2 * k * zpow)
            series += term
            zpow *= z2
            nxt = abs(to_mp(bernoulli_number(2 * k + 2))) / ((2 * k + 2) * zpow)
            if nxt <= tol:
                remainder = nxt
                break
            k += 1
        value = mpmath.log(z) - 1 / (2 * z) - series - recip
        rounding = (shift + k + 16) * _eps() * (abs(mpmath.log(z)) + recip + 1)
        return BoundedValue(value, remainder + rounding)


def cot_value(a: int, b: int, budget: PrecisionBudget) -> BoundedValue:
    """cot(pi a / b) for coprime 1 <= a < b, b >= 3."""
    _check_pair(a, b)
    with budget.workdps():
        c = mpmath.cot(mpmath.pi * a / b)
        eb = (abs(c) + (1 + c * c) * 4 + 1) * 8 * _eps()
        return BoundedValue(c, eb)
