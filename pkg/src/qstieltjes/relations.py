"""Integer-relation search over high-precision real vectors and the probes built on it.

A relation among v_1..v_n is sought as a short vector of the lattice spanned by the
rows (e_i, round(C v_i)).  Any relation c with max|c_i| <= B gives a lattice vector of
norm at most sqrt(n B^2 + (n B (1/2 + C err))^2); when every Gram-Schmidt norm of the
reduced basis exceeds that, no such relation exists and the "none" outcome is
certified for the rounded data.  Found relations are re-checked at twice the precision.

"none_below_bound" is evidence about the given precision and bound only; it never
proves linear independence.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

import mpmath

from .errors import ArgumentError, DomainError, EvaluationError, PrecisionFloorError
from .identities import reflection_correction
from .lattice import lll_reduce
from .numerics import BoundedValue, PrecisionBudget, to_mp
from .qzeta import QPoint, gamma0, parse_q
from .special import ResidueSystem, cot_value, totient

FOUND = "found"
NONE = "none_below_bound"


class RelationRecoveryError(EvaluationError):
    """A relation known to hold was not rediscovered."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class RealVector:
    labels: list[str]
    values: list[BoundedValue]
    working_digits: int
    evaluator: Callable[[int], list[BoundedValue]] | None = None

    def __post_init__(self):
        if len(self.labels) != len(self.values) or len(self.values) < 2:
            raise ArgumentError("need at least two labelled values")
        with mpmath.workdps(self.working_digits + 10):
            for label, v in zip(self.labels, self.values):
                if isinstance(v.value, mpmath.mpc):
                    raise ArgumentError(f"{label}: relation search needs real values")
                allowed = mpmath.power(10, -self.working_digits + 10) * max(1, abs(v.value))
                if v.error_bound > allowed:
                    raise ArgumentError(f"{label}: error bound too large for {self.working_digits} digits")

    def scaled(self, factor: Fraction) -> "RealVector":
        with mpmath.workdps(self.working_digits + 10):
            f = to_mp(factor)
            values = [v * f for v in self.values]
        evaluator = None
        if self.evaluator is not None:
            base = self.evaluator

            def evaluator(digits):
                with mpmath.workdps(digits + 10):
                    return [v * to_mp(factor) for v in base(digits)]

        return RealVector(list(self.labels), values, self.working_digits, evaluator)


@dataclass
class RelationCertificate:
    status: str
    coefficients: list[int] | None
    residual: BoundedValue
    coefficient_bound: int
    digits_used: int
    labels: list[str] = field(default_factory=list)
    certified_absent: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


def precision_floor(length: int, coefficient_bound: int) -> int:
    return math.ceil(10 * length + 2 * math.log10(max(coefficient_bound, 1)))


def _normalise(c: Sequence[int]) -> list[int]:
    g = reduce(math.gcd, (abs(x) for x in c), 0) or 1
    c = [x // g for x in c]
    first = next(x for x in c if x)
    return [-x for x in c] if first < 0 else c


def _combination(coeffs, values, digits) -> BoundedValue:
    with mpmath.workdps(digits + 10):
        total = BoundedValue(0, 0)
        for c, v in zip(coeffs, values):
            if c:
                total = total + v * c
        return total


def find_relation(v: RealVector, coefficient_bound: int, budget: PrecisionBudget | None = None) -> RelationCertificate:
    """Look for integers c, not all zero, max|c_i| <= coefficient_bound, with sum c_i v_i = 0."""
    n = len(v.values)
    digits = v.working_digits
    floor = precision_floor(n, coefficient_bound)
    if digits < floor:
        raise PrecisionFloorError(f"precision {digits} below floor {floor} for length {n}, bound {coefficient_bound}")
    with mpmath.workdps(digits + 20):
        max_err = max((x.error_bound for x in v.values), default=mpmath.mpf(0))
        scale = mpmath.power(10, digits)
        if max_err > 0:
            scale = min(scale, 1 / max_err)
        bits = int(mpmath.floor(mpmath.log(scale, 2)))
        big_c = mpmath.ldexp(mpmath.mpf(1), bits)
        column = [int(mpmath.nint(big_c * x.value)) for x in v.values]
        noise = float(mpmath.mpf("0.5") + big_c * max_err)
    rows = [[int(i == j) for j in range(n)] + [column[i]] for i in range(n)]
    red = lll_reduce(rows)
    threshold = mpmath.power(10, -(digits // 2))

    best = None
    for row in red.basis:
        c = row[:n]
        if not any(c) or max(abs(x) for x in c) > coefficient_bound:
            continue
        c = _normalise(c)
        res = _combination(c, v.values, digits)
        if res.upper_abs() <= threshold:
            if best is None or max(map(abs, c)) < max(map(abs, best[0])):
                best = (c, res)

    notes = {"lattice_scale_bits": bits}
    if best is not None:
        c, res = best
        if v.evaluator is not None:
            res2 = _combination(c, v.evaluator(2 * digits), 2 * digits)
            notes["recheck_digits"] = 2 * digits
            notes["recheck_residual_bound"] = mpmath.nstr(res2.upper_abs(), 5)
            if res2.upper_abs() > mpmath.power(10, -digits):
                notes["rejected_candidate"] = c
                best = None
            else:
                res = res2
        if best is not None:
            return RelationCertificate(FOUND, c, res, coefficient_bound, digits, list(v.labels), False, notes)

    # certificate of absence: every lattice vector of a small relation is shorter than lambda_1 bound
    gs_min = min(red.gs_norms_squared())
    relation_norm_sq = n * coefficient_bound**2 + (n * coefficient_bound * noise) ** 2
    certified = gs_min > relation_norm_sq
    notes["min_gram_schmidt_norm"] = mpmath.nstr(mpmath.sqrt(mpmath.mpf(gs_min.numerator) / gs_min.denominator), 5)
    shortest = min(red.basis, key=lambda r: sum(x * x for x in r[:n]))
    res = _combination(shortest[:n], v.values, digits)
    return RelationCertificate(NONE, None, res, coefficient_bound, digits, list(v.labels), certified, notes)


# ---------------------------------------------------------------------------
# vectors of gamma0 values
# ---------------------------------------------------------------------------

def _rational_q(q) -> Fraction:
    qv, unc = parse_q(q)
    if unc:
        raise ArgumentError("relation probes need an exact rational q")
    if qv <= 1:
        raise DomainError("q must exceed 1")
    return qv


def _budget(digits: int) -> PrecisionBudget:
    return PrecisionBudget(digits + 10, guard_digits=20)


def _gamma0_values(q: Fraction, b: int, digits: int) -> list[BoundedValue]:
    budget = _budget(digits)
    return [gamma0(QPoint(q, Fraction(a, b)), budget) for a in ResidueSystem.of(b).full_system]


def _cot_part(q: Fraction, a: int, b: int, digits: int) -> BoundedValue:
    budget = _budget(digits)
    cot = cot_value(a, b, budget)
    with budget.workdps():
        qm = to_mp(q)
        return BoundedValue.rounded((qm - 1) / mpmath.log(qm) * mpmath.pi, 8) * cot


@dataclass
class ProbeReport:
    kind: str
    params: dict
    certificate: RelationCertificate
    elapsed_s: float
    extra: dict = field(default_factory=dict)


CONTROL_KINDS = ("residual", "cot", "combination")


def _control_kind(control) -> str | None:
    if control in (None, False):
        return None
    if control is True:
        return "residual"
    if control not in CONTROL_KINDS:
        raise ArgumentError(f"unknown control {control!r}; choose from {CONTROL_KINDS}")
    return control


def _reflection_combination(q: Fraction, a: int, b: int, vals, residues, digits, with_cot: bool) -> BoundedValue:
    # gamma0(a/b) - gamma0(1 - a/b) - (2q-3)(1/2 - a/b), optionally minus the cot part too
    cot = _cot_part(q, a, b, digits) if with_cot else BoundedValue(0, 0)
    with _budget(digits).workdps():
        affine = (2 * q - 3) * (Fraction(1, 2) - Fraction(a, b))
        return vals[residues.index(a)] - vals[residues.index(b - a)] - to_mp(affine) - cot


def conjecture_a_vector(q, b: int, digits: int, control=None) -> RealVector:
    """{1} and gamma0(q, a/b) over reduced residues a, optionally with a control entry.

    Controls, all for the first residue a0 of the half system:

    * ``"residual"`` (or True): lhs minus the printed rhs of the reflection
      formula.  If the formula were exact this is 0 and the search must report
      the unit relation on it.
    * ``"cot"``: ((q-1)/log q) pi cot(pi a0/b), related to the basis exactly when
      the reflection formula is.
    * ``"combination"``: gamma0(a0/b) - gamma0(1 - a0/b) - (2q-3)(1/2 - a0/b), a
      rational combination of the basis; exercises the engine only.
    """
    qv = _rational_q(q)
    kind = _control_kind(control)
    system = ResidueSystem.of(b)
    a0 = system.half_system[0]
    labels = ["1"] + [f"gamma0({qv},{a}/{b})" for a in system.full_system]
    diff = f"gamma0({qv},{a0}/{b})-gamma0({qv},{b - a0}/{b})"
    if kind == "residual":
        labels.append(f"{diff}-pi*(q-1)/log(q)*cot(pi*{a0}/{b})-(2q-3)(1/2-{a0}/{b})")
    elif kind == "cot":
        labels.append(f"pi*(q-1)/log(q)*cot(pi*{a0}/{b})")
    elif kind == "combination":
        labels.append(f"{diff}-(2q-3)(1/2-{a0}/{b})")

    def evaluate(d):
        g = _gamma0_values(qv, b, d)
        vals = [BoundedValue(1, 0)] + g
        if kind in ("residual", "combination"):
            vals.append(_reflection_combination(qv, a0, b, g, system.full_system, d, kind == "residual"))
        elif kind == "cot":
            vals.append(_cot_part(qv, a0, b, d))
        return vals

    return RealVector(labels, evaluate(digits), digits, evaluate)


def probe_conjecture_A(q, b: int, digits: int = 150, coefficient_bound: int = 10**8, control=None) -> ProbeReport:
    start = time.perf_counter()
    kind = _control_kind(control)
    vec = conjecture_a_vector(q, b, digits, kind)
    cert = find_relation(vec, coefficient_bound)
    return ProbeReport(
        "conjectureA",
        {"q": str(_rational_q(q)), "b": b, "digits": digits, "coefficient_bound": coefficient_bound,
         "control": kind, "length": len(vec.values)},
        cert,
        time.perf_counter() - start,
    )


def t2_expected_relation(q, a: int, b: int) -> list[int]:
    """(1, -1, -(2q-3)(1/2 - a/b)) cleared of denominators and normalised."""
    qv = _rational_q(q)
    affine = -(2 * qv - 3) * (Fraction(1, 2) - Fraction(a, b))
    den = affine.denominator
    return _normalise([den, -den, int(affine * den)])


def recover_t2_relation(q, a: int, b: int, digits: int = 100, coefficient_bound: int = 10**8,
                        subtract_correction: bool = False) -> ProbeReport:
    """Rediscover the reflection identity from (difference, cot part, 1).

    ``subtract_correction`` removes the exponentially small remainder of the
    reflection formula from the difference first (diagnostic; at q = 2 the
    remainder is the only gap between the printed identity and the truth).
    """
    qv = _rational_q(q)
    start = time.perf_counter()

    def evaluate(d):
        vals = _gamma0_values(qv, b, d)
        residues = ResidueSystem.of(b).full_system
        diff_budget = _budget(d)
        correction = reflection_correction(qv, a, b, diff_budget) if subtract_correction else BoundedValue(0, 0)
        with diff_budget.workdps():
            diff = vals[residues.index(a)] - vals[residues.index(b - a)] - correction
        return [diff, _cot_part(qv, a, b, d), BoundedValue(1, 0)]

    first = f"gamma0({qv},{a}/{b})-gamma0({qv},{b - a}/{b})"
    if subtract_correction:
        first += "-remainder"
    labels = [first, f"pi*(q-1)/log(q)*cot(pi*{a}/{b})", "1"]
    vec = RealVector(labels, evaluate(digits), digits, evaluate)
    cert = find_relation(vec, coefficient_bound)
    expected = t2_expected_relation(qv, a, b)
    matches = cert.found and cert.coefficients == expected
    report = ProbeReport(
        "t2-recover",
        {"q": str(qv), "a": a, "b": b, "digits": digits, "coefficient_bound": coefficient_bound,
         "subtract_correction": subtract_correction},
        cert,
        time.perf_counter() - start,
        {"expected": expected, "matches_expected": matches},
    )
    if not matches and digits >= 100:
        raise RelationRecoveryError(f"known relation {expected} not recovered", report)
    return report


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumberFieldSpec:
    """Q(alpha) for a real root alpha of an irreducible rational polynomial.

    ``minimal_polynomial`` lists coefficients from the leading term down;
    ``root_enclosure`` is a rational interval isolating the designated root.
    """

    minimal_polynomial: tuple[Fraction, ...]
    root_enclosure: tuple[Fraction, Fraction]
    label: str = "alpha"

    MAX_DEGREE = 6

    @property
    def degree(self) -> int:
        return len(self.minimal_polynomial) - 1

    @classmethod
    def from_string(cls, text: str, root_index: int = -1, label: str | None = None) -> "NumberFieldSpec":
        """Parse e.g. ``"x^2-2"``; ``root_index`` picks among real roots in increasing order."""
        import sympy

        x = sympy.Symbol("x")
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals={"x": x})
            poly = sympy.Poly(expr, x, domain=sympy.QQ)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise ArgumentError(f"cannot parse polynomial {text!r}") from exc
        if poly.degree() < 1:
            raise ArgumentError("minimal polynomial must have degree >= 1")
        if poly.degree() > cls.MAX_DEGREE:
            raise ArgumentError(f"degree {poly.degree()} exceeds the desk-scale cap {cls.MAX_DEGREE}")
        if not poly.is_irreducible:
            raise ArgumentError(f"{text!r} is reducible over Q")
        intervals = poly.intervals()
        if not intervals:
            raise ArgumentError(f"{text!r} has no real root")
        try:
            (lo, hi), _ = intervals[root_index]
        except IndexError as exc:
            raise ArgumentError(f"root index {root_index} out of range") from exc
        lead = poly.LC()
        coeffs = tuple(Fraction(int(sympy.numer(c / lead)), int(sympy.denom(c / lead))) for c in poly.all_coeffs())
        enclosure = (Fraction(int(sympy.numer(lo)), int(sympy.denom(lo))), Fraction(int(sympy.numer(hi)), int(sympy.denom(hi))))
        return cls(coeffs, enclosure, label or "alpha")

    def _eval_exact(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in self.minimal_polynomial:
            acc = acc * t + c
        return acc

    def alpha(self, digits: int) -> BoundedValue:
        """The designated root to ``digits`` places, certified by an exact sign change."""
        lo, hi = self.root_enclosure
        if lo == hi:
            return BoundedValue(to_mp(lo), 0)
        if self.degree == 1:
            root = -self.minimal_polynomial[1] / self.minimal_polynomial[0]
            return BoundedValue(to_mp(root), 0)
        with mpmath.workdps(digits + 20):
            coeffs = [to_mp(c) for c in self.minimal_polynomial]
            # bisection to a safe Newton start, then Newton
            a_, b_ = to_mp(lo), to_mp(hi)
            fa = mpmath.polyval(coeffs, a_)
            for _ in range(60):
                m = (a_ + b_) / 2
                fm = mpmath.polyval(coeffs, m)
                if fm == 0:
                    a_ = b_ = m
                    break
                if (fm > 0) == (fa > 0):
                    a_, fa = m, fm
                else:
                    b_ = m
            t = (a_ + b_) / 2
            dcoeffs = [c * (self.degree - i) for i, c in enumerate(coeffs[:-1])]
            for _ in range(200):
                step = mpmath.polyval(coeffs, t) / mpmath.polyval(dcoeffs, t)
                t -= step
                if abs(step) < mpmath.power(10, -(digits + 15)):
                    break
            eps = Fraction(1, 10 ** (digits + 8))
            centre = Fraction(int(mpmath.nint(t * 10 ** (digits + 15))), 10 ** (digits + 15))
            left, right = self._eval_exact(centre - eps), self._eval_exact(centre + eps)
            if left == 0 or right == 0 or (left > 0) == (right > 0):
                raise EvaluationError("root refinement failed to certify a sign change")
            return BoundedValue(to_mp(centre), to_mp(eps))


def probe_number_field(
    q,
    b: int,
    number_field: NumberFieldSpec,
    digits: int = 200,
    coefficient_bound: int = 10**6,
    planted: bool = False,
) -> ProbeReport:
    """F-linear independence of {1, gamma0(q, a/b)} as Q-independence of the alpha^i multiples.

    ``planted`` appends (1 + 2 alpha) gamma0(q, a0/b) - 3 alpha, a value with a known
    relation to the basis.
    """
    qv = _rational_q(q)
    deg = number_field.degree
    system = ResidueSystem.of(b)
    base_labels = ["1"] + [f"gamma0({qv},{a}/{b})" for a in system.full_system]
    labels = [lab if i == 0 else f"{number_field.label}^{i}*{lab}" for i in range(deg) for lab in base_labels]
    if planted:
        labels.append(f"(1+2*{number_field.label})*gamma0({qv},{system.full_system[0]}/{b})-3*{number_field.label}")

    def evaluate(d):
        base = [BoundedValue(1, 0)] + _gamma0_values(qv, b, d)
        alpha = number_field.alpha(d + 10)
        with mpmath.workdps(d + 20):
            powers = [BoundedValue(1, 0)]
            for _ in range(1, deg):
                powers.append(powers[-1] * alpha)
            vals = [p * v for p in powers for v in base]
            if planted:
                vals.append((alpha * 2 + 1) * base[1] - alpha * 3)
        return vals

    start = time.perf_counter()
    vec = RealVector(labels, evaluate(digits), digits, evaluate)
    cert = find_relation(vec, coefficient_bound)
    poly = " ".join(str(c) for c in number_field.minimal_polynomial)
    return ProbeReport(
        "numberfield",
        {"q": str(qv), "b": b, "digits": digits, "coefficient_bound": coefficient_bound,
         "minpoly_coefficients": poly, "degree": deg, "planted": planted, "length": len(vec.values)},
        cert,
        time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# dimension bounds
# ---------------------------------------------------------------------------

def dimension_report(q, b: int, number_field: NumberFieldSpec | None = None, cyclotomic_flag: bool = False,
                     evidence: ProbeReport | None = None) -> dict:
    """Proven and conjectured dimension statements for the span of {1, gamma0(q, a/b)}.

    Disjoint case (F and Q(zeta_b) meet only in Q): dim >= phi(b)/2 + 1 is proven and
    dim = phi(b) + 1 is conjectured.  When kappa_a lies in F (for instance F contains
    Q(zeta_b)) and q is rational: 2 <= dim <= phi(b)/2 + 2 is proven.
    """
    qv = _rational_q(q)
    if b < 3:
        raise ArgumentError("b must be at least 3")
    phi = totient(b)
    report = {
        "q": str(qv),
        "b": b,
        "phi": phi,
        "spanning_set_size": phi + 1,
        "field": "Q" if number_field is None else " ".join(str(c) for c in number_field.minimal_polynomial),
        "cyclotomic_flag": cyclotomic_flag,
        "disjoint_case": {
            "applies": not cyclotomic_flag,
            "lower_bound": {"value": phi // 2 + 1, "status": "proven"},
            "conjectured_dimension": {"value": phi + 1, "status": "conjectured"},
        },
        "kappa_case": {
            "applies": cyclotomic_flag,
            "lower_bound": {"value": 2, "status": "proven"},
            "upper_bound": {"value": phi // 2 + 2, "status": "proven"},
        },
    }
    if evidence is not None:
        report["evidence"] = evidence
    return report


# ---------------------------------------------------------------------------
# planted-relation self test
# ---------------------------------------------------------------------------

STANDARD_CONSTANTS: dict[str, Callable[[], object]] = {
    "1": lambda: mpmath.mpf(1),
    "pi": lambda: +mpmath.pi,
    "e": lambda: +mpmath.e,
    "log2": lambda: +mpmath.ln2,
    "log3": lambda: mpmath.log(3),
    "log5": lambda: mpmath.log(5),
    "sqrt2": lambda: mpmath.sqrt(2),
    "sqrt3": lambda: mpmath.sqrt(3),
    "cbrt2": lambda: mpmath.cbrt(2),
    "zeta3": lambda: mpmath.zeta(3),
    "euler_gamma": lambda: +mpmath.euler,
    "catalan": lambda: +mpmath.catalan,
    "pi^2": lambda: mpmath.pi**2,
    "golden": lambda: +mpmath.phi,
    "exp(pi)": lambda: mpmath.exp(mpmath.pi),
}


def constants_vector(names: Sequence[str], digits: int, extra: Sequence[int] | None = None) -> RealVector:
    """Named constants, optionally followed by the planted combination sum extra_i * const_i."""
    unknown = [n for n in names if n not in STANDARD_CONSTANTS]
    if unknown:
        raise ArgumentError(f"unknown constants {unknown}; known: {sorted(STANDARD_CONSTANTS)}")
    labels = list(names)
    if extra is not None:
        labels.append("planted(" + ",".join(str(c) for c in extra) + ")")

    def evaluate(d):
        with mpmath.workdps(d + 10):
            vals = [BoundedValue.rounded(STANDARD_CONSTANTS[n](), 8) for n in names]
            if extra is not None:
                total = BoundedValue(0, 0)
                for c, v in zip(extra, vals):
                    total = total + v * c
                vals.append(total)
        return vals

    return RealVector(labels, evaluate(digits), digits, evaluate)


def planted_trial(rng: random.Random, digits: int = 120, coefficient_bound: int = 10**4, size: int = 6):
    """Pick ``size`` distinct constants and a random relation; return (planted, certificate)."""
    names = rng.sample(sorted(STANDARD_CONSTANTS), size)
    coeffs = [rng.randint(-coefficient_bound, coefficient_bound) for _ in range(size)]
    if not any(coeffs):
        coeffs[0] = 1
    planted = coeffs + [-1]
    vec = constants_vector(names, digits, coeffs)
    # coefficient search bound must admit the planted vector itself
    return _normalise(planted), find_relation(vec, coefficient_bound)
