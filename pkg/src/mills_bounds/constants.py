"""Optimal terminal constants c_k* and the quantities derived from them.

``c_k*`` is the unique value making the depth-k continued fraction exact at
zero, h_k(0) = sqrt(2/pi).  It satisfies c_0* = 2/pi and c_k* c_{k-1}* = k^2;
values are produced by the benign two-step form
c_k* = (k/(k-1))^2 c_{k-2}*.

The sequence is cached in a grow-only table.  Readers never take the lock;
extension builds the new tail off to the side and publishes it in one
assignment.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import comb

from .ext import ExtReal, PI, ctx

RELIABLE_K_MAX = 10_000


class _ConstantTable:
    def __init__(self) -> None:
        self._values: tuple[ExtReal, ...] = (2 / PI, PI / 2)
        self._lock = threading.Lock()

    def get(self, k: int) -> ExtReal:
        values = self._values
        if k < len(values):
            return values[k]
        with self._lock:
            values = list(self._values)
            for n in range(len(values), k + 1):
                ratio = ctx.mpf(n) / (n - 1)
                values.append(ratio * ratio * values[n - 2])
            self._values = tuple(values)
        return self._values[k]

    @property
    def max_k(self) -> int:
        return len(self._values) - 1


_table = _ConstantTable()


def _check_k(k: int) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    return int(k)


def c_star(k: int) -> ExtReal:
    """The optimal constant c_k* (c_0* = 2/pi, c_1* = pi/2, c_2* = 8/pi, ...)."""
    return _table.get(_check_k(k))


def c_star_product_form(k: int) -> ExtReal:
    """c_k* from the closed double-factorial products, evaluated in log space.

    Independent of the recurrence; used only as a cross-check.
    """
    k = _check_k(k)
    # even k = 2m: (2*4*...*2m / 1*3*...*(2m-1))^2 * 2/pi
    # odd  k = 2m+1: (1*3*...*(2m+1) / 2*4*...*2m)^2 * pi/2
    m = k // 2
    if k % 2 == 0:
        log_ratio = ctx.fsum(ctx.log(2 * i) - ctx.log(2 * i - 1) for i in range(1, m + 1))
        return ctx.exp(2 * log_ratio) * 2 / PI
    log_ratio = ctx.fsum(ctx.log(2 * i + 1) - ctx.log(2 * i) for i in range(1, m + 1))
    return ctx.exp(2 * log_ratio) * PI / 2


def delta_k(k: int) -> ExtReal:
    """Decay rate of the exponential terminal, (k + 1 - c_k*)/sqrt(c_k*)."""
    c = c_star(k)
    return (k + 1 - c) / ctx.sqrt(c)


def delta_k_difference_form(k: int) -> ExtReal:
    """The same rate written as sqrt(c_{k+1}*) - sqrt(c_k*)."""
    return ctx.sqrt(c_star(k + 1)) - ctx.sqrt(c_star(k))


def x_star(k: int) -> ExtReal:
    """Maximizer of |error| for the square-root family.

    2 sqrt(c)(c - k - 1/2) / sqrt((c - k)(k + 1 - c)) with c = c_k*.
    """
    c = c_star(k)
    return 2 * ctx.sqrt(c) * (c - k - ctx.mpf(1) / 2) / ctx.sqrt((c - k) * (k + 1 - c))


def x_star_alt_form(k: int) -> ExtReal:
    """x_star with the denominator written as sqrt(1/4 - (c - k - 1/2)^2)."""
    c = c_star(k)
    s = c - k - ctx.mpf(1) / 2
    return 2 * ctx.sqrt(c) * s / ctx.sqrt(ctx.mpf(1) / 4 - s * s)


def x_tilde(k: int) -> ExtReal:
    """Maximizer of |error| for the rational family.

    2 sqrt(c)(c - k - 1/2) / ((c - k)(k + 1 - c)) with c = c_k*.
    """
    c = c_star(k)
    return 2 * ctx.sqrt(c) * (c - k - ctx.mpf(1) / 2) / ((c - k) * (k + 1 - c))


def x_tilde_alt_form(k: int) -> ExtReal:
    c = c_star(k)
    s = c - k - ctx.mpf(1) / 2
    return 2 * ctx.sqrt(c) * s / (ctx.mpf(1) / 4 - s * s)


@dataclass(frozen=True)
class ExcessReport:
    """Slacks of the chain 1/(8(k+1)) < c - k - 1/2 < 1/(8c) < 1/(8(k+1/2))."""

    k: int
    lower_slack: ExtReal
    middle_slack: ExtReal
    upper_slack: ExtReal

    @property
    def holds(self) -> bool:
        return self.lower_slack > 0 and self.middle_slack > 0 and self.upper_slack > 0


def lemma3_check(k: int) -> ExcessReport:
    c = c_star(k)
    excess = c - k - ctx.mpf(1) / 2
    return ExcessReport(
        k=k,
        lower_slack=excess - 1 / (8 * ctx.mpf(k + 1)),
        middle_slack=1 / (8 * c) - excess,
        upper_slack=1 / (8 * (k + ctx.mpf(1) / 2)) - 1 / (8 * c),
    )


def binomial_identity_check(k: int) -> bool:
    """Central-binomial bracket for even k.

    sqrt(pi) C(k, k/2) 2^-(k+1/2) sqrt(k+1/2) must lie in
    [1 - 1/(16(k+1/2)^2), 1].  The binomial is exact; only the final
    product is rounded.
    """
    k = _check_k(k)
    if k % 2 or k < 2:
        raise ValueError(f"binomial identity needs an even k >= 2, got {k}")
    half_up = k + ctx.mpf(1) / 2
    value = ctx.sqrt(PI) * comb(k, k // 2) * ctx.power(2, -half_up) * ctx.sqrt(half_up)
    return 1 - 1 / (16 * half_up**2) <= value <= 1


def binomial_form_sqrt_c(k: int) -> ExtReal:
    """sqrt(c_k*) = sqrt(2/pi) 2^k / C(k, k/2) for even k."""
    k = _check_k(k)
    if k % 2:
        raise ValueError(f"binomial form needs an even k, got {k}")
    return ctx.sqrt(2 / PI) * ctx.mpf(2) ** k / comb(k, k // 2)


@dataclass(frozen=True)
class TailConstants:
    """Snapshot of the materialized constant sequences up to ``max_k``."""

    c_star: tuple[ExtReal, ...]
    delta: tuple[ExtReal, ...]
    x_star: tuple[ExtReal, ...]
    x_tilde: tuple[ExtReal, ...]
    max_k: int
    working_digits: int = ctx.dps


def tail_constants(max_k: int) -> TailConstants:
    ks = range(_check_k(max_k) + 1)
    return TailConstants(
        c_star=tuple(c_star(k) for k in ks),
        delta=tuple(delta_k(k) for k in ks),
        x_star=tuple(x_star(k) for k in ks),
        x_tilde=tuple(x_tilde(k) for k in ks),
        max_k=max_k,
    )
