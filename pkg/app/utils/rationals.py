"""
Exact rational helpers: parsing and printing of "p/q" strings.
"""

import re
from fractions import Fraction
from math import comb
from typing import Any, Optional

from app.core.config import settings

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value: Any) -> Fraction:
    """
    Convert a document value into an exact Fraction.

    Accepts Fractions, ints and strings of the form "p/q" or "p". Floats are
    refused: they cannot carry an exact value.

    Raises:
        ValueError: if the value is not an exact rational
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"malformed rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if match:
            numerator = int(match.group(1))
            denominator = int(match.group(2)) if match.group(2) is not None else 1
            if denominator == 0:
                raise ValueError(f"malformed rational: {value!r} has zero denominator")
            return Fraction(numerator, denominator)
    raise ValueError(f"malformed rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical "p/q" text; integers print without a denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def approx(value: Fraction, digits: Optional[int] = None) -> str:
    """Decimal approximation for humans. Never used in decisions."""
    digits = settings.DECIMAL_DIGITS if digits is None else digits
    value = Fraction(value)
    scaled = round(value * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def describe(value: Fraction) -> str:
    """"p/q (~d.dddddd)" for log lines and console output."""
    return f"{format_rational(value)} (~{approx(value)})"


def binomial(n: int, k: int) -> int:
    """C(n, k) with C(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)
