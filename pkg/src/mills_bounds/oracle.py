"""High-precision reference values for the Gaussian density, tail and Mills' ratio.

Two independent evaluation routes are implemented for the upper tail:

* the Maclaurin series of the distribution function, used for ``x <= 4``;
* the classical continued fraction for Mills' ratio, evaluated by backward
  recurrence with adaptively doubled depth, used for ``x > 4``.

Both routes are public so they can be cross-checked against each other.
Internally they run at 70 significant digits and round to the shared
50-digit working context on return.
"""

from __future__ import annotations

from functools import lru_cache

from mpmath.ctx_mp import MPContext

from .ext import ExtReal, RealLike, ctx, ext

SERIES_CUTOFF = 4
CF_START_DEPTH = 32
CF_MAX_DEPTH = 1 << 22

_hi = MPContext()
_hi.dps = 70
_HI_TERM_FLOOR = _hi.mpf(10) ** -(_hi.dps - 5)
_CF_TOL = _hi.mpf(10) ** -(ctx.dps - 3)


class OracleError(ArithmeticError):
    """The reference evaluator could not reach its accuracy target."""


def gaussian_density(x: RealLike) -> ExtReal:
    """Standard normal density exp(-x^2/2)/sqrt(2 pi)."""
    x = ext(x)
    return ctx.exp(-x * x / 2) / ctx.sqrt(2 * ctx.pi)


def upper_tail_series(x: RealLike) -> ExtReal:
    """1 - Phi(x) from the Maclaurin series of Phi.

    Accurate for moderate ``|x|``; the alternating terms peak near
    ``k ~ x^2/2`` so cancellation costs about x^2/(2 ln 10) digits plus the
    digits lost subtracting from 1/2.  At x = 4 that is 8 of the 70 internal
    digits.
    """
    xh = _hi.mpf(ext(x))
    x2 = xh * xh
    # term_k = (-1)^k x^(2k+1) / (2^k k!), summed with weights 1/(2k+1)
    power = xh
    total = _hi.mpf(0)
    k = 0
    while True:
        contribution = power / (2 * k + 1)
        total += contribution
        if abs(contribution) < _HI_TERM_FLOOR and k > 2:
            break
        k += 1
        power = -power * x2 / (2 * k)
    return ctx.mpf(_hi.mpf(1) / 2 - total / _hi.sqrt(2 * _hi.pi))


def _mills_cf(xh, depth: int):
    r = xh
    for j in range(depth, 0, -1):
        r = xh + j / r
    return 1 / r


def mills_ratio_cf(
    x: RealLike, depth: int | None = None, rel_tol: RealLike | None = None
) -> tuple[ExtReal, int]:
    """Mills' ratio from the continued fraction x + 1/(x + 2/(x + 3/...)).

    With ``depth`` given, the fraction is truncated there.  Otherwise the
    depth doubles until two successive values agree to the working
    tolerance (``rel_tol``, default about 1e-47); the converged value and
    the depth used are returned.  Requires ``x > 0``.
    """
    x = ext(x)
    if x <= 0:
        raise ValueError("continued fraction for Mills' ratio needs x > 0")
    xh = _hi.mpf(x)
    if depth is not None:
        return ctx.mpf(_mills_cf(xh, depth)), depth
    tol = _CF_TOL if rel_tol is None else _hi.mpf(ext(rel_tol))
    n = CF_START_DEPTH
    prev = _mills_cf(xh, n)
    while n < CF_MAX_DEPTH:
        n *= 2
        cur = _mills_cf(xh, n)
        if abs(cur - prev) <= tol * abs(cur):
            return ctx.mpf(cur), n
        prev = cur
    raise OracleError(f"continued fraction did not converge at x={x} (depth {n})")


def upper_tail_cf(
    x: RealLike, depth: int | None = None, rel_tol: RealLike | None = None
) -> ExtReal:
    """1 - Phi(x) as density times the continued-fraction Mills' ratio (x > 0)."""
    ratio, _ = mills_ratio_cf(x, depth, rel_tol)
    return gaussian_density(x) * ratio


@lru_cache(maxsize=1 << 16)
def _upper_tail_nonneg(x: ExtReal) -> ExtReal:
    if x <= SERIES_CUTOFF:
        return upper_tail_series(x)
    return upper_tail_cf(x)


def upper_tail(x: RealLike) -> ExtReal:
    """Reference value of 1 - Phi(x) for any finite real ``x``.

    Negative arguments go through 1 - Phi(x) = 1 - (1 - Phi(-x)).  Results
    are memoized, so repeated grid sweeps pay for the oracle once.
    """
    x = ext(x)
    if x < 0:
        return 1 - _upper_tail_nonneg(-x)
    return _upper_tail_nonneg(x)


def lower_tail(x: RealLike) -> ExtReal:
    """Phi(x)."""
    return upper_tail(-ext(x))


def mills_ratio(x: RealLike) -> ExtReal:
    """(1 - Phi(x)) / phi(x)."""
    x = ext(x)
    return upper_tail(x) / gaussian_density(x)
