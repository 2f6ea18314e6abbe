"""Integral LLL reduction on exact Python integers.

Follows the classical all-integer formulation (Gram-Schmidt data kept as the
integers d_i = prod_{j<=i} |b*_j|^2 and lambda_{k,j} = d_j mu_{k,j}), so there is no
floating-point drift at any size of entry.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError


@dataclass
class Reduction:
    basis: list[list[int]]
    # d[0] = 1, d[i] = product of the first i squared Gram-Schmidt norms
    d: list[int]

    def gs_norms_squared(self) -> list[Fraction]:
        return [Fraction(self.d[i + 1], self.d[i]) for i in range(len(self.basis))]


def _dot(u, v) -> int:
    return sum(x * y for x, y in zip(u, v))


def _round_div(n: int, d: int) -> int:
    """Nearest integer to n/d for d > 0 (halves rounded up)."""
    return (2 * n + d) // (2 * d)


def lll_reduce(rows: list[list[int]], delta: Fraction = Fraction(99, 100)) -> Reduction:
    """LLL-reduce linearly independent integer row vectors with Lovasz constant ``delta``."""
    if not rows:
        raise ArgumentError("empty basis")
    if not (Fraction(1, 4) < delta <= 1):
        raise ArgumentError("delta must lie in (1/4, 1]")
    b = [[int(x) for x in row] for row in rows]
    n = len(b)
    dn, dd = delta.numerator, delta.denominator
    lam = [[0] * n for _ in range(n)]
    d = [1] + [0] * n  # d[i+1] belongs to vector i
    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise ArgumentError("basis vectors are linearly dependent")
    k, kmax = 1, 0

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = _round_div(lam[k][l], d[l + 1])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * d[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        big = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (big * t + lm * lam[i][k]) // d[k + 1]
        d[k] = big

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ArgumentError("basis vectors are linearly dependent")
                    d[k + 1] = u
        red(k, k - 1)
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return Reduction(b, d)
