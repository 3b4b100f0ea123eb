"""Experiment reports: exact JSON with a decimal rendering next to every rational."""

from __future__ import annotations

import csv
import io
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import mpmath

TOOL = "ratproof"
GAP_COLUMNS = (
    "input",
    "label",
    "answer_bit",
    "optimum",
    "best_opposing",
    "utility_gap",
    "invalid_rip",
    "profiles",
    "tapes",
)


@contextmanager
def _long_ints():
    """Exact binomial tails have denominators with thousands of digits."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def decimal(value: Fraction, digits: int = 20) -> str:
    """Decimal rendering with ``digits`` significant digits (display only)."""
    if value.denominator == 1:
        return str(value.numerator)
    with mpmath.workdps(digits + 10):
        x = mpmath.mpf(value.numerator) / value.denominator
        return mpmath.nstr(x, digits, min_fixed=-30, max_fixed=30)


def encode(obj):
    """Plain JSON data; each Fraction becomes {"exact": "p/q", "decimal": "..."}."""
    with _long_ints():
        return _encode(obj)


def decode(obj):
    with _long_ints():
        return _decode(obj)


def _encode(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return {"exact": str(obj), "decimal": decimal(obj)}
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"exact", "decimal"}:
            return Fraction(obj["exact"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


@dataclass
class Report:
    version: str
    timestamp: str
    config: dict
    protocol: dict
    audit: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    gap_table: list = field(default_factory=list)
    gap_check: dict | None = None
    decider: list = field(default_factory=list)
    transform: dict | None = None
    amplification: dict | None = None
    tool: str = TOOL

    def to_dict(self) -> dict:
        return encode(asdict(self))

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in decode(data).items() if k in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def gap_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(GAP_COLUMNS)
        for row in self.gap_table:
            writer.writerow(["" if row.get(c) is None else str(row[c]) for c in GAP_COLUMNS])
        return buf.getvalue()

