"""Command-line front end: ``qstieltjes {eval,verify,relate} ...``.

Exit codes: 0 success, 1 some identity check failed, 2 invalid input or a
refused computation (one JSON line on stderr says why), 3 a known relation was
not recovered.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath

from . import identities, relations
from .errors import ArgumentError, DomainError, QZetaError
from .numerics import PrecisionBudget, to_mp
from .qzeta import QPoint, extract_laurent, gamma0, gamma1, laurent_closed_form, parse_q, zeta_q
from .reports import RENDERERS, envelope, to_plain, write_atomic
from .special import ResidueSystem, as_fraction

DIGITS_ENV = "QSTIELTJES_DIGITS"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RECOVERY = 0, 1, 2, 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _bound(text: str) -> int:
    try:
        value = Fraction(text)  # accepts "1e8" and "100000000" alike
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient bound {text!r}") from exc
    if value.denominator != 1 or value < 1:
        raise argparse.ArgumentTypeError(f"coefficient bound must be a positive integer, got {text!r}")
    return int(value)


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return 50
    try:
        return int(raw)
    except ValueError:
        raise ArgumentError(f"{DIGITS_ENV}={raw!r} is not an integer") from None


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    if "q" in names:
        p.add_argument("--q", required=True, help='q > 1 as "p/r", integer or decimal literal')
    if "x" in names:
        p.add_argument("--x", required=True, help='0 < x <= 1 as "p/r"')
    if "a" in names:
        p.add_argument("--a", type=int)
    if "all-a" in names:
        p.add_argument("--all-a", action="store_true", help="run every admissible a for the given b")
    if "b" in names:
        p.add_argument("--b", type=int, required=True)
    p.add_argument("--digits", type=int, default=None, help=f"target digits (default ${DIGITS_ENV} or 50)")
    p.add_argument("--format", choices=sorted(RENDERERS), default="json")
    p.add_argument("--out", help="write the report here (atomically) instead of stdout")
    p.add_argument("--timing", action="store_true", help="record elapsed_ms (otherwise null, for reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="qstieltjes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_ArgumentParser)

    ev = sub.add_parser("eval", help="evaluate zeta_q or its Laurent coefficients")
    evs = ev.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    p = evs.add_parser("zeta")
    _common(p, "q", "x")
    p.add_argument("--s", required=True, help='Re(s) > 1; e.g. "2", "3/2" or "2+1j"')
    p.add_argument("--method", choices=["auto", "direct", "split"], default="auto")
    p = evs.add_parser("gamma0")
    _common(p, "q", "x")
    p = evs.add_parser("gamma1")
    _common(p, "q", "x")
    p.add_argument("--unhalved", action="store_true", help="use the un-halved log(q-1) coefficient variant")
    p = evs.add_parser("laurent")
    _common(p, "q", "x")
    p.add_argument("--source", choices=["extrapolated", "closed_form"], default="extrapolated")

    ver = sub.add_parser("verify", help="check identities numerically and exactly")
    vs = ver.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name in ("t2", "kappa"):
        p = vs.add_parser(name)
        _common(p, "q", "a", "all-a", "b")
        p.add_argument("--form", choices=identities.REFLECTION_FORMS, default="printed")
        p.add_argument("--jobs", type=int, default=1)
        if name == "t2":
            p.add_argument("--perturb", default="0", help="shift the rhs by this rational (negative control)")
    p = vs.add_parser("lemma31")
    _common(p, "a", "all-a", "b")
    p.add_argument("--jobs", type=int, default=1)
    p = vs.add_parser("lfunction")
    _common(p, "a", "all-a", "b")
    p.add_argument("--terms", type=int, default=10**6)
    p.add_argument("--jobs", type=int, default=1)
    p = vs.add_parser("galois")
    _common(p, "q", "b")

    rel = sub.add_parser("relate", help="integer-relation probes")
    rs = rel.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    p = rs.add_parser("search", help="relation search among named constants, or the planted self-test")
    _common(p)
    p.add_argument("--constants", help="comma-separated names, e.g. 1,pi,log2")
    p.add_argument("--planted-trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=_bound, default=10**8)
    p = rs.add_parser("conjectureA")
    _common(p, "q", "b")
    p.add_argument("--bound", type=_bound, default=10**8)
    p.add_argument("--control", choices=["none", *relations.CONTROL_KINDS], default="none")
    p = rs.add_parser("numberfield")
    _common(p, "q", "b")
    p.add_argument("--minpoly", required=True, help='e.g. "x^2-2"')
    p.add_argument("--root-index", type=int, default=-1, help="real root by increasing order (default largest)")
    p.add_argument("--planted", action="store_true")
    p.add_argument("--bound", type=_bound, default=10**6)
    p = rs.add_parser("t2-recover")
    _common(p, "q", "a", "b")
    p.add_argument("--bound", type=_bound, default=10**8)
    p.add_argument("--subtract-correction", action="store_true",
                   help="remove the exponentially small remainder before searching (diagnostic)")
    p = rs.add_parser("dimensions")
    _common(p, "q", "b")
    p.add_argument("--minpoly")
    p.add_argument("--cyclotomic", action="store_true", help="assume F contains Q(zeta_b)")
    p.add_argument("--evidence", action="store_true", help="attach a conjectureA search at --digits")
    p.add_argument("--bound", type=_bound, default=10**8)
    return parser


# ---------------------------------------------------------------------------
# argument checks shared by the commands
# ---------------------------------------------------------------------------

def _digits(args) -> int:
    digits = args.digits if args.digits is not None else _default_digits()
    if digits < 10:
        raise ArgumentError("digits must be at least 10")
    return digits


def _q_text(args) -> str:
    qv, unc = parse_q(args.q)
    if qv <= 1:
        raise DomainError("q must exceed 1")
    return str(qv) if not unc else args.q


def _a_values(args, half: bool) -> list[int]:
    system = ResidueSystem.of(args.b)
    choices = system.half_system if half else system.full_system
    if args.all_a:
        return list(choices)
    if args.a is None:
        raise ArgumentError("give --a or --all-a")
    return [args.a]


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _parse_s(text: str, budget: PrecisionBudget):
    with budget.workdps():
        try:
            if "j" in text:
                return mpmath.mpmathify(text.replace(" ", ""))
            return to_mp(Fraction(text))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ArgumentError(f"cannot parse s={text!r}") from exc


def _cmd_eval(args, digits):
    point = QPoint.parse(args.q, as_fraction(args.x))
    budget = PrecisionBudget(digits)
    params = {"q": _q_text(args), "x": str(point.x), "digits": digits}
    if args.command == "zeta":
        s = _parse_s(args.s, budget)
        params.update(s=args.s, method=args.method)
        value = zeta_q(s, point, budget, args.method)
    elif args.command == "gamma0":
        value = gamma0(point, budget)
    elif args.command == "gamma1":
        params["variant"] = "unhalved" if args.unhalved else "printed"
        value = gamma1(point, budget, halved_log_term=not args.unhalved)
    else:
        params["source"] = args.source
        if args.source == "extrapolated":
            data = extract_laurent(point, budget)
        else:
            data = laurent_closed_form(point, budget)
        parts = {k: to_plain(getattr(data, k), digits) for k in ("residue", "gamma0", "gamma1")}
        body = {
            "value": {k: v["value"] for k, v in parts.items()},
            "error_bound": {k: v["error_bound"] for k, v in parts.items()},
            "digits": digits,
        }
        return params, body, EXIT_OK
    plain = to_plain(value, digits)
    return params, {"value": plain["value"], "error_bound": plain["error_bound"], "digits": digits}, EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_one(task):
    """Run one identity check and return plain records; top level so processes can pickle it."""
    command, kwargs, digits = task
    budget = PrecisionBudget(digits)
    if command == "t2":
        reps = [identities.verify_t2(kwargs["q"], kwargs["a"], kwargs["b"], budget,
                                     perturb=kwargs["perturb"], form=kwargs["form"])]
    elif command == "kappa":
        reps = [identities.verify_kappa(kwargs["q"], kwargs["a"], kwargs["b"], budget, form=kwargs["form"])]
    elif command == "lemma31":
        reps = [identities.verify_lemma31(kwargs["a"], kwargs["b"], budget)]
    elif command == "lfunction":
        reps = identities.verify_lfunction(kwargs["a"], kwargs["b"], budget, kwargs["terms"])
    else:
        reps = identities.galois_orbit_check(kwargs["q"], kwargs["b"], budget)
    return [to_plain(r, digits) for r in reps]


def _cmd_verify(args, digits):
    cmd = args.command
    params: dict = {"digits": digits, "b": args.b}
    base: dict = {"b": args.b}
    if cmd in ("t2", "kappa", "galois"):
        params["q"] = base["q"] = _q_text(args)
    if cmd in ("t2", "kappa"):
        params["form"] = base["form"] = args.form
    if cmd == "t2":
        base["perturb"] = Fraction(args.perturb)
        params["perturb"] = str(base["perturb"])
    if cmd == "lfunction":
        params["terms"] = base["terms"] = args.terms
    if cmd == "galois":
        tasks = [(cmd, base, digits)]
    else:
        avals = _a_values(args, half=cmd != "lemma31")
        params["a"] = avals
        tasks = [(cmd, dict(base, a=a), digits) for a in avals]
    jobs = getattr(args, "jobs", 1)
    if jobs > 1 and len(tasks) > 1:
        # mpmath precision is process-global, so parallelism uses processes
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_verify_one, tasks))
    else:
        chunks = [_verify_one(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    all_pass = all(rec["verdict"] == "pass" for rec in records)
    return params, {"records": records, "all_pass": all_pass}, EXIT_OK if all_pass else EXIT_FAIL


# ---------------------------------------------------------------------------
# relate
# ---------------------------------------------------------------------------

def _cmd_relate(args, digits):
    cmd = args.command
    params: dict = {"digits": digits}
    if cmd == "search":
        params.update(bound=args.bound, seed=args.seed)
        if args.planted_trials:
            rng = random.Random(args.seed)
            records, hits = [], 0
            for i in range(args.planted_trials):
                planted, cert = relations.planted_trial(rng, digits, args.bound)
                ok = cert.found and cert.coefficients == planted
                hits += ok
                records.append({"trial": i, "planted": planted, "recovered": ok,
                                "certificate": to_plain(cert, digits)})
            params["planted_trials"] = args.planted_trials
            return params, {"records": records, "recovered": hits}, EXIT_OK
        if not args.constants:
            raise ArgumentError("give --constants or --planted-trials")
        names = [n.strip() for n in args.constants.split(",") if n.strip()]
        params["constants"] = names
        cert = relations.find_relation(relations.constants_vector(names, digits), args.bound)
        return params, {"certificate": to_plain(cert, digits)}, EXIT_OK

    params["q"] = _q_text(args)
    params["b"] = args.b
    if cmd == "conjectureA":
        control = None if args.control == "none" else args.control
        report = relations.probe_conjecture_A(args.q, args.b, digits, args.bound, control)
        return params, {"report": to_plain(report, digits)}, EXIT_OK
    if cmd == "numberfield":
        nf = relations.NumberFieldSpec.from_string(args.minpoly, args.root_index)
        params.update(minpoly=args.minpoly, root_index=args.root_index)
        report = relations.probe_number_field(args.q, args.b, nf, digits, args.bound, args.planted)
        return params, {"report": to_plain(report, digits)}, EXIT_OK
    if cmd == "t2-recover":
        if args.a is None:
            raise ArgumentError("t2-recover needs --a")
        params["a"] = args.a
        try:
            report = relations.recover_t2_relation(args.q, args.a, args.b, digits, args.bound,
                                                   args.subtract_correction)
        except relations.RelationRecoveryError as exc:
            return params, {"report": to_plain(exc.certificate, digits), "error": str(exc)}, EXIT_RECOVERY
        return params, {"report": to_plain(report, digits)}, EXIT_OK
    # dimensions
    nf = relations.NumberFieldSpec.from_string(args.minpoly) if args.minpoly else None
    evidence = relations.probe_conjecture_A(args.q, args.b, digits, args.bound) if args.evidence else None
    report = relations.dimension_report(args.q, args.b, nf, args.cyclotomic, evidence)
    return params, {"report": to_plain(report, digits)}, EXIT_OK


COMMANDS = {"eval": _cmd_eval, "verify": _cmd_verify, "relate": _cmd_relate}


def _fail(exc: Exception) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "reason": str(exc)}, sort_keys=True) + "\n")
    return EXIT_INPUT


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        digits = _digits(args)
        start = time.perf_counter()
        params, body, code = COMMANDS[args.group](args, digits)
        elapsed = round((time.perf_counter() - start) * 1000, 3) if args.timing else None
        doc = envelope(f"{args.group} {args.command}", params, body, elapsed)
        text = RENDERERS[args.format](doc)
    except QZetaError as exc:
        return _fail(exc)
    except (ValueError, ZeroDivisionError) as exc:
        return _fail(ArgumentError(str(exc)))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
