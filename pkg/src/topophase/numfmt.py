"""Locale-independent numeric formatting shared by all emitters."""
from __future__ import annotations

import math

SIG_DIGITS = 9
# magnitudes below this are printed as 0 so rounding noise never leaks out
ZERO_CUTOFF = 5e-13


def fmt(x: float) -> str:
    """9 significant digits; no negative zero."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    if abs(x) < ZERO_CUTOFF:
        return "0"
    return f"{x:.{SIG_DIGITS}g}"


def fmt_fixed(x: float) -> str:
    """9 decimal digits (used for the theta column)."""
    x = float(x)
    if abs(x) < ZERO_CUTOFF:
        x = 0.0
    return f"{x:.9f}"


def rounded(x: float) -> float:
    """``x`` rounded to 9 significant digits, for JSON payloads."""
    return float(fmt(x))
