"""Turning results into deterministic JSON, CSV and text.

Every numeric value is rendered once, by :func:`to_plain`, into a string made by
``mpmath.nstr``; JSON, CSV and text all print those same strings, so the three
encodings of one run never disagree.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import tempfile
from fractions import Fraction

import mpmath

from . import __version__
from .cyclotomic import CyclotomicElement
from .identities import IdentityReport
from .numerics import BoundedValue
from .relations import ProbeReport, RelationCertificate

BOUND_DIGITS = 5


def fmt_number(x, digits: int) -> str | dict:
    # wrapping happens at a precision wide enough to keep every stored bit
    with mpmath.workdps(max(digits, 15) + 20):
        if isinstance(x, (mpmath.mpc, complex)):
            x = mpmath.mpmathify(x)
            return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits)}
        return mpmath.nstr(mpmath.mpmathify(x), digits)


def fmt_bounded(v: BoundedValue, digits: int) -> dict:
    return {"value": fmt_number(v.value, digits), "error_bound": fmt_number(v.error_bound, BOUND_DIGITS)}


def to_plain(obj, digits: int):
    """Recursively convert results into JSON-ready dicts, lists and strings."""
    if isinstance(obj, BoundedValue):
        return fmt_bounded(obj, digits)
    if isinstance(obj, IdentityReport):
        return {
            "name": obj.name,
            "params": to_plain(obj.params, digits),
            "lhs": to_plain(obj.lhs, digits),
            "rhs": to_plain(obj.rhs, digits),
            "residual": to_plain(obj.residual, digits),
            "tolerance": to_plain(obj.tolerance, BOUND_DIGITS),
            "verdict": obj.status,
            "exact_equal": obj.exact_equal,
            "notes": to_plain(obj.notes, digits),
        }
    if isinstance(obj, RelationCertificate):
        return {
            "status": obj.status,
            "coefficients": obj.coefficients,
            "residual": to_plain(obj.residual, BOUND_DIGITS),
            "coefficient_bound": obj.coefficient_bound,
            "digits_used": obj.digits_used,
            "labels": list(obj.labels),
            "certified_absent": obj.certified_absent,
            "notes": to_plain(obj.notes, digits),
        }
    if isinstance(obj, ProbeReport):
        # elapsed time is left to the caller so that output stays reproducible
        return {
            "kind": obj.kind,
            "params": to_plain(obj.params, digits),
            "certificate": to_plain(obj.certificate, digits),
            "extra": to_plain(obj.extra, digits),
        }
    if isinstance(obj, CyclotomicElement):
        return {"level": obj.level, "coefficients": [str(c) for c in obj.coefficients]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name), digits) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, digits) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, mpmath.mpf, mpmath.mpc, complex)):
        return fmt_number(obj, digits)
    return str(obj)


def envelope(command: str, params: dict, body: dict, elapsed_ms=None) -> dict:
    out = {"command": command, "version": __version__, "params": params, "elapsed_ms": elapsed_ms}
    out.update(body)
    return out


def render_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(obj, prefix: str, out: dict) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(obj, list) and all(not isinstance(v, (dict, list)) for v in obj):
        out[prefix] = " ".join("" if v is None else str(v) for v in obj)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}.{i}", out)
    else:
        out[prefix] = "" if obj is None else (str(obj).lower() if isinstance(obj, bool) else str(obj))


def csv_rows(doc: dict) -> list[dict]:
    """One row per record in ``doc["records"]`` (or one row for the whole document)."""
    shared = {k: v for k, v in doc.items() if k != "records"}
    records = doc.get("records")
    rows = []
    for rec in records if records is not None else [None]:
        row: dict = {}
        _flatten(shared, "", row)
        if rec is not None:
            _flatten(rec, "record", row)
        rows.append(row)
    return rows


def render_csv(doc: dict) -> str:
    rows = csv_rows(doc)
    header = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def render_text(doc: dict) -> str:
    lines = []
    for row in csv_rows(doc):
        for key in sorted(row):
            if row[key] != "":
                lines.append(f"{key}: {row[key]}")
        lines.append("")
    return "\n".join(lines)


RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the same directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
