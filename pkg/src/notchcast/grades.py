"""The 22-grade S&P long-term rating scale and its ordinal notch encoding.

A grade is a canonical symbol string ("AAA" ... "D"); the notch encoding
maps D -> 0 up to AAA -> 21, so higher notch = better credit quality and
one notch = one rating step.
"""

from __future__ import annotations

import operator

from .errors import OutOfRange, UnknownGrade

# Best to worst. Exactly 22 symbols; position defines the notch value.
SCALE: tuple[str, ...] = (
    "AAA",
    "AA+",
    "AA",
    "AA-",
    "A+",
    "A",
    "A-",
    "BBB+",
    "BBB",
    "BBB-",
    "BB+",
    "BB",
    "BB-",
    "B+",
    "B",
    "B-",
    "CCC+",
    "CCC",
    "CCC-",
    "CC",
    "C",
    "D",
)

NUM_GRADES = len(SCALE)
TOP_NOTCH = NUM_GRADES - 1

_NOTCH_BY_GRADE = {symbol: TOP_NOTCH - rank for rank, symbol in enumerate(SCALE)}


def parse_rating(text: str) -> str:
    """Return the canonical grade symbol for ``text``.

    Matching is case-insensitive after trimming whitespace. Anything else
    (modifiers like "u", outlook suffixes, unknown symbols) raises
    UnknownGrade.
    """
    symbol = text.strip().upper()
    if symbol not in _NOTCH_BY_GRADE:
        raise UnknownGrade(f"unknown rating symbol: {text!r}")
    return symbol


def grade_to_notch(grade: str) -> int:
    """Ordinal notch of a canonical grade symbol (D=0 ... AAA=21)."""
    try:
        return _NOTCH_BY_GRADE[grade]
    except KeyError:
        raise UnknownGrade(f"unknown rating symbol: {grade!r}") from None


def notch_to_grade(notch: int) -> str:
    """Inverse of grade_to_notch."""
    try:
        value = operator.index(notch)
    except TypeError:
        raise OutOfRange(f"notch must be an integer, got {notch!r}") from None
    if not 0 <= value <= TOP_NOTCH:
        raise OutOfRange(f"notch must be in [0, {TOP_NOTCH}], got {value}")
    return SCALE[TOP_NOTCH - value]
