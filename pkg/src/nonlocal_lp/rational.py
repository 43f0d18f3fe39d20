"""Exact rational helpers.

``fractions.Fraction`` is the rational type used everywhere in the package:
it keeps numerator and denominator in lowest terms with a positive
denominator after every operation.  This module only adds the strict
``"num/den"`` text encoding used by the file formats and reports.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?)(\d+)(?:/(\d+))?$")


class RationalFormatError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a Fraction.

    Only the canonical encoding is accepted: lowest terms, positive
    denominator, no ``/1`` suffix, no leading zeros, no ``-0``.  This makes
    ``format_rational(parse_rational(s)) == s`` hold for every accepted
    string.
    """
    if not isinstance(text, str):
        raise RationalFormatError(f"expected a string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalFormatError(f"not a rational literal: {text!r}")
    sign, num, den = m.groups()
    if den is not None and int(den) == 0:
        raise RationalFormatError(f"zero denominator: {text!r}")
    value = Fraction(int(num), int(den) if den is not None else 1)
    if format_rational(-value if sign else value) != text:
        raise RationalFormatError(f"rational not in canonical form: {text!r}")
    return -value if sign else value


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and canonical strings; reject floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def dumps_records(data: dict) -> str:
    """JSON text with each list element on its own line."""
    parts = []
    for key, value in data.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            body = ",\n".join("  " + json.dumps(v, separators=(", ", ": ")) for v in value)
            parts.append(f" {json.dumps(key)}: [\n{body}\n ]")
        else:
            parts.append(f" {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(parts) + "\n}"
