"""JSON wire format for instances, allocations and reports.

Rationals travel as strings, ``"p"`` or ``"p/q"``; floats never appear.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import Allocation, Instance, InstanceError, as_allocation, check_allocation

_RATIONAL = re.compile(r"(?:0|[1-9][0-9]*(?:/[1-9][0-9]*)?)\Z")


class ParseError(InstanceError):
    def __init__(self, field_name: str, reason: str):
        super().__init__("%s: %s" % (field_name, reason))
        self.field = field_name
        self.reason = reason


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def parse_rational(text, field_name: str = "value") -> Fraction:
    if not isinstance(text, str):
        raise ParseError(field_name, "expected a rational string, got %s" % type(text).__name__)
    if text.startswith("-"):
        raise ParseError(field_name, "negative utility %r" % text)
    if not _RATIONAL.match(text):
        raise ParseError(field_name, "malformed rational %r" % text)
    return Fraction(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load(text, what):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(what, "invalid JSON (%s)" % exc) from None
    if not isinstance(doc, dict):
        raise ParseError(what, "top level must be an object")
    return doc


def _int_field(doc, name):
    value = doc.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(name, "expected an integer")
    return value


# --- instances ---------------------------------------------------------------

def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "type_split": inst.type_split,
        "normalized": inst.normalized,
        "u_first": [format_rational(v) for v in inst.u_first],
        "u_second": [format_rational(v) for v in inst.u_second],
    }


def serialize_instance(inst: Instance) -> str:
    return _dump(instance_to_dict(inst))


def parse_instance(text) -> Instance:
    doc = _load(text, "instance")
    n = _int_field(doc, "n")
    m = _int_field(doc, "m")
    split = _int_field(doc, "type_split")
    normalized = doc.get("normalized")
    if not isinstance(normalized, bool):
        raise ParseError("normalized", "expected a boolean")
    rows = []
    for name in ("u_first", "u_second"):
        row = doc.get(name)
        if not isinstance(row, list):
            raise ParseError(name, "expected a list")
        if len(row) != m:
            raise ParseError(name, "has %d entries, m is %d" % (len(row), m))
        rows.append(tuple(parse_rational(v, "%s[%d]" % (name, g)) for g, v in enumerate(row)))
    if n < 2:
        raise ParseError("n", "need at least 2 agents")
    if not 1 <= split < n:
        raise ParseError("type_split", "must lie in [1, %d]" % (n - 1))
    if normalized:
        for name, row in zip(("u_first", "u_second"), rows):
            if sum(row, Fraction(0)) != 1:
                raise ParseError(name, "normalized is true but the row sums to %s" % format_rational(sum(row, Fraction(0))))
    return Instance(n, split, rows[0], rows[1], normalized)


# --- allocations -------------------------------------------------------------

def allocation_to_dict(alloc) -> dict:
    return {"bundles": [sorted(b) for b in alloc]}


def serialize_allocation(alloc) -> str:
    return _dump(allocation_to_dict(alloc))


def parse_allocation(text, inst: Optional[Instance] = None) -> Allocation:
    """Read ``{"bundles": [[...], ...]}``; other keys are ignored so solve reports parse too."""
    doc = _load(text, "allocation")
    bundles = doc.get("bundles")
    if not isinstance(bundles, list) or not all(isinstance(b, list) for b in bundles):
        raise ParseError("bundles", "expected a list of integer lists")
    for a, b in enumerate(bundles):
        for g in b:
            if isinstance(g, bool) or not isinstance(g, int):
                raise ParseError("bundles[%d]" % a, "item %r is not an integer" % (g,))
        if len(set(b)) != len(b):
            raise ParseError("bundles[%d]" % a, "repeated item")
    if inst is not None:
        return check_allocation(inst, bundles)
    alloc = as_allocation(bundles)
    seen = set()
    for a, b in enumerate(alloc):
        if b & seen:
            raise ParseError("bundles[%d]" % a, "overlaps an earlier bundle")
        if any(g < 0 for g in b):
            raise ParseError("bundles[%d]" % a, "negative item index")
        seen |= b
    return alloc


# --- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class SolveReport:
    algorithm: str
    welfare: Fraction
    ef1: bool
    complete: bool
    allocation: Allocation
    oracle_opt: Optional[Fraction] = None
    ratio_bound_satisfied: Optional[bool] = None
    candidates: tuple = field(default=())  # (item or None, case or None, welfare)


def report_to_dict(report: SolveReport) -> dict:
    doc = {
        "algorithm": report.algorithm,
        "welfare": format_rational(report.welfare),
        "oracle_opt": None if report.oracle_opt is None else format_rational(report.oracle_opt),
        "ratio_bound_satisfied": report.ratio_bound_satisfied,
        "ef1": report.ef1,
        "complete": report.complete,
        "bundles": [sorted(b) for b in report.allocation],
    }
    if report.candidates:
        doc["candidates"] = [
            {"item": item, "case": case, "welfare": format_rational(w)} for item, case, w in report.candidates
        ]
    return doc


def serialize_report(report: SolveReport) -> str:
    return _dump(report_to_dict(report))


def parse_report(text) -> SolveReport:
    doc = _load(text, "report")
    opt = doc.get("oracle_opt")
    return SolveReport(
        algorithm=doc["algorithm"],
        welfare=parse_rational(doc["welfare"], "welfare"),
        ef1=doc["ef1"],
        complete=doc["complete"],
        allocation=parse_allocation(text),
        oracle_opt=None if opt is None else parse_rational(opt, "oracle_opt"),
        ratio_bound_satisfied=doc.get("ratio_bound_satisfied"),
        candidates=tuple(
            (c["item"], c["case"], parse_rational(c["welfare"], "candidates.welfare"))
            for c in doc.get("candidates", ())
        ),
    )


def oracle_report_to_dict(report) -> dict:
    return {
        "opt_ef1": format_rational(report.opt_ef1),
        "unconstrained_max": format_rational(report.unconstrained_max),
        "ef1_count": report.ef1_count,
        "bundles": [sorted(b) for b in report.best_alloc],
    }


def serialize_oracle_report(report) -> str:
    return _dump(oracle_report_to_dict(report))


def parse_oracle_report(text):
    from .oracle import OracleReport

    doc = _load(text, "oracle report")
    return OracleReport(
        opt_ef1=parse_rational(doc["opt_ef1"], "opt_ef1"),
        best_alloc=parse_allocation(text),
        unconstrained_max=parse_rational(doc["unconstrained_max"], "unconstrained_max"),
        ef1_count=_int_field(doc, "ef1_count"),
    )
