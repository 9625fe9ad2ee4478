"""Fixed-point token amounts and exact score values.

Token balances are plain integers counting 1e-8 token subunits, so every
settlement is exact and conservation checks can demand equality rather than
tolerance. Scores live on the real interval [0, 100]; inside the ledger they
are kept as `fractions.Fraction` so trimmed means, weights, and reward shares
stay exact end to end. Decimal text like "0.2" converts through the string
form, preserving the writer's decimal intent instead of the nearest binary
float.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Numeric = Union[int, float, str, Fraction]

SUBUNITS_PER_TOKEN = 10**8

SCORE_MIN = Fraction(0)
SCORE_MAX = Fraction(100)


def as_fraction(value: Numeric) -> Fraction:
    """Convert a number to an exact Fraction.

    Floats and strings go through their decimal text so "0.2" means 1/5,
    not the binary double closest to it.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value: {value!r}")
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a number")


def to_subunits(tokens: Numeric) -> int:
    """Convert a token amount to integer subunits, rejecting residue.

    Raises ValueError if the amount is negative or finer than 1e-8 tokens.
    """
    frac = as_fraction(tokens) * SUBUNITS_PER_TOKEN
    if frac < 0:
        raise ValueError(f"negative token amount: {tokens!r}")
    if frac.denominator != 1:
        raise ValueError(f"amount {tokens!r} is not a multiple of 1e-8 tokens")
    return frac.numerator


def format_tokens(subunits: int) -> str:
    """Render subunits as a decimal token string, e.g. 5000000000 -> '50.00000000'."""
    sign = "-" if subunits < 0 else ""
    whole, part = divmod(abs(subunits), SUBUNITS_PER_TOKEN)
    return f"{sign}{whole}.{part:08d}"


def as_score(value: Numeric) -> Fraction:
    """Validate and convert a score to an exact Fraction in [0, 100]."""
    score = as_fraction(value)
    if not SCORE_MIN <= score <= SCORE_MAX:
        raise ValueError(f"score {value!r} outside [0, 100]")
    return score


def floor_mul(amount: int, frac: Fraction) -> int:
    """floor(amount * frac) for a subunit amount and an exact fraction."""
    return (amount * frac.numerator) // frac.denominator


def floor_share(amount: int, weight: Fraction, total: Fraction) -> int:
    """floor(amount * weight / total), exact; the caller routes the dust."""
    if weight < 0 or total <= 0:
        raise ValueError("shares need weight >= 0 and total > 0")
    ratio = weight / total
    return (amount * ratio.numerator) // ratio.denominator
