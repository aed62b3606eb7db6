"""Exact integer polynomials P_k, Q_k turning the continued fraction into a ratio.

With P_0 = 1, P_1 = x, Q_0 = 0, Q_1 = 1 and, for k >= 2,

    P_k = (k-1) P_{k-2} + x P_{k-1},    Q_k = (k-1) Q_{k-2} + x Q_{k-1},

the depth-k fraction with terminal g equals

    h_k = (k P_{k-1} + P_k g) / (k Q_{k-1} + Q_k g)            (k >= 1)
        = (P_{k+1} + P_k G) / (Q_{k+1} + Q_k G)   where g = x + G.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .ext import ExtReal, RealLike, ctx, ext

MAX_DEGREE_INDEX = 200


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients ascending by degree, no trailing zeros."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def __call__(self, x: RealLike) -> ExtReal:
        x = ext(x)
        acc = ctx.mpf(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return IntPolynomial(
            tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))
        )

    def scale(self, factor: int) -> "IntPolynomial":
        return IntPolynomial(tuple(factor * c for c in self.coefficients))

    def shift(self) -> "IntPolynomial":
        """Multiply by x."""
        if not self.coefficients:
            return self
        return IntPolynomial((0,) + self.coefficients)

    def padded(self, length: int) -> tuple[int, ...]:
        return self.coefficients + (0,) * (length - len(self.coefficients))

    def __str__(self) -> str:
        terms = []
        for d, c in reversed(list(enumerate(self.coefficients))):
            if c == 0:
                continue
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            coef = str(c) if (c != 1 or d == 0) else ""
            terms.append(coef + mono)
        return " + ".join(terms) if terms else "0"


_lock = threading.Lock()
_P: tuple[IntPolynomial, ...] = (IntPolynomial((1,)), IntPolynomial((0, 1)))
_Q: tuple[IntPolynomial, ...] = (IntPolynomial(()), IntPolynomial((1,)))


def pq_polynomials(k: int) -> tuple[IntPolynomial, IntPolynomial]:
    """(P_k, Q_k), built once and memoized."""
    global _P, _Q
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    if k > MAX_DEGREE_INDEX + 1:
        raise ValueError(f"k = {k} exceeds the supported range (<= {MAX_DEGREE_INDEX + 1})")
    if k >= len(_P):
        with _lock:
            P, Q = list(_P), list(_Q)
            for n in range(len(P), k + 1):
                P.append(P[n - 2].scale(n - 1) + P[n - 1].shift())
                Q.append(Q[n - 2].scale(n - 1) + Q[n - 1].shift())
            _P, _Q = tuple(P), tuple(Q)
    return _P[k], _Q[k]


def eval_rational_form(k: int, x: RealLike, g_value: RealLike) -> ExtReal:
    """h_k(x) = (k P_{k-1} + P_k g) / (k Q_{k-1} + Q_k g) for k >= 1."""
    if k < 1:
        raise ValueError("the rational form needs k >= 1 (h_0 is the terminal itself)")
    x, g = ext(x), ext(g_value)
    if not g > 0:
        raise ValueError(f"terminal value must be positive, got {g}")
    p_prev, q_prev = pq_polynomials(k - 1)
    p_k, q_k = pq_polynomials(k)
    num = k * p_prev(x) + p_k(x) * g
    den = k * q_prev(x) + q_k(x) * g
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in rational form at k={k}")
    return num / den


def eval_shifted_form(k: int, x: RealLike, big_g: RealLike) -> ExtReal:
    """h_k(x) = (P_{k+1} + P_k G) / (Q_{k+1} + Q_k G) with terminal g = x + G."""
    x, big_g = ext(x), ext(big_g)
    p_k, q_k = pq_polynomials(k)
    p_next, q_next = pq_polynomials(k + 1)
    den = q_next(x) + q_k(x) * big_g
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in shifted form at k={k}")
    return (p_next(x) + p_k(x) * big_g) / den


def pq_rows(k_max: int) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """Rows (k, P_k coefficients, Q_k coefficients) for k = 0..k_max."""
    rows = []
    for k in range(k_max + 1):
        p, q = pq_polynomials(k)
        # keep Q_0 = 0 visible as a single zero coefficient
        rows.append((k, p.coefficients, q.coefficients or (0,)))
    return rows
