"""Signed fixed-point numbers with 28 fractional bits.

Values live in [-8, 8). Arithmetic saturates instead of wrapping. Raw
values are plain Python ints so intermediate products stay exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

FRAC_BITS = 28
ONE = 1 << FRAC_BITS
RAW_MAX = 8 * ONE - 1
RAW_MIN = -8 * ONE
RESOLUTION = 2.0 ** -FRAC_BITS
MAX_VALUE = RAW_MAX / ONE

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1


class SaturationWarning(UserWarning):
    """A value fell outside the fixed-point range and was clamped."""


def saturate(raw: int) -> tuple[int, bool]:
    if raw > RAW_MAX:
        return RAW_MAX, True
    if raw < RAW_MIN:
        return RAW_MIN, True
    return raw, False


def _round_div(num: int, den: int) -> int:
    """Integer division rounding to nearest, ties away from zero."""
    if den < 0:
        num, den = -num, -den
    q, r = divmod(abs(num), den)
    if 2 * r >= den:
        q += 1
    return q if num >= 0 else -q


@dataclass(frozen=True, order=True)
class Fixed:
    raw: int

    @classmethod
    def from_float(cls, x: float) -> Fixed:
        return quantize(x)

    def __float__(self) -> float:
        return self.raw / ONE

    def __repr__(self) -> str:
        return f"Fixed({self.raw / ONE!r})"


def quantize_raw(x: float) -> tuple[int, bool]:
    """Round-to-nearest raw value for ``x`` plus a saturation flag."""
    if math.isnan(x):
        raise ValueError("cannot quantize NaN")
    if math.isinf(x):
        return (RAW_MAX, True) if x > 0 else (RAW_MIN, True)
    return saturate(round(x * ONE))


def quantize(x: float) -> Fixed:
    raw, clamped = quantize_raw(x)
    if clamped:
        warnings.warn(f"{x!r} outside fixed-point range, clamped", SaturationWarning, stacklevel=2)
    return Fixed(raw)


def widen(x: Fixed) -> float:
    return x.raw / ONE


# Raw arithmetic. Each returns (raw, saturated).

def fx_add(a: int, b: int) -> tuple[int, bool]:
    return saturate(a + b)


def fx_sub(a: int, b: int) -> tuple[int, bool]:
    return saturate(a - b)


def fx_mul(a: int, b: int) -> tuple[int, bool]:
    return saturate(_round_div(a * b, ONE))


def fx_mul_int(a: int, n: int) -> tuple[int, bool]:
    """Scale a fixed raw value by an integer; exact before saturation."""
    return saturate(a * n)


def fx_div(num: int, den: int) -> tuple[int, bool]:
    """Divide two raw fixed values (same scale)."""
    if den == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    return saturate(_round_div(num * ONE, den))


def int_ratio_to_fixed(num: int, den: int) -> tuple[int, bool]:
    """Exact integer ratio rounded to the nearest fixed value."""
    if den == 0:
        raise ZeroDivisionError("division by zero")
    return saturate(_round_div(num * ONE, den))


def wrap_int32(v: int) -> int:
    return ((v - INT32_MIN) % (1 << 32)) + INT32_MIN
