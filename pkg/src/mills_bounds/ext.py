"""Extended-precision carrier shared by every numeric module.

All arithmetic runs in a private mpmath context so that the caller's global
``mpmath.mp`` settings are never touched.  Working precision is 50 decimal
digits; the public contracts only promise 25-30.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from mpmath.ctx_mp import MPContext

WORKING_DPS = 50

ctx = MPContext()
ctx.dps = WORKING_DPS

ExtReal = type(ctx.mpf(0))
RealLike = Union[int, float, str, Fraction, "ExtReal"]

ZERO = ctx.mpf(0)
ONE = ctx.mpf(1)
HALF = ctx.mpf(1) / 2
PI = +ctx.pi
SQRT_2PI = ctx.sqrt(2 * PI)
SQRT_2_OVER_PI = ctx.sqrt(2 / PI)


def ext(x: RealLike) -> ExtReal:
    """Convert ``x`` to an extended-precision real.

    Strings are parsed at full working precision, so ``ext("0.1")`` is the
    decimal 0.1 rather than the nearest double.
    """
    if isinstance(x, ExtReal):
        return x
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, bool):
        raise TypeError("booleans are not reals")
    value = ctx.mpf(x)
    if not ctx.isfinite(value):
        raise ValueError(f"expected a finite real, got {x!r}")
    return value


def fmt(x: ExtReal, digits: int = 20) -> str:
    """Deterministic decimal rendering with ``digits`` significant digits.

    Trailing zeros are kept so every value carries exactly ``digits``
    digits; exponents are lowercase and unpadded (``1.0e-30``).
    """
    return ctx.nstr(x, digits, strip_zeros=False)


def scaled(x: ExtReal) -> tuple[ExtReal, int]:
    """Split ``x`` into ``(mantissa, exponent)`` with ``1 <= |mantissa| < 10``.

    Useful for tail values far below the double range.
    """
    if x == 0:
        return ZERO, 0
    e = int(ctx.floor(ctx.log10(abs(x))))
    m = x / ctx.mpf(10) ** e
    # log10 can land one off at exact powers of ten
    if abs(m) >= 10:
        m, e = m / 10, e + 1
    elif abs(m) < 1:
        m, e = m * 10, e - 1
    return m, e


def relative_error(a: ExtReal, b: ExtReal) -> ExtReal:
    """|a - b| / |b| (absolute difference when ``b`` is zero)."""
    if b == 0:
        return abs(a - b)
    return abs(a - b) / abs(b)
