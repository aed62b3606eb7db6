"""Continued-fraction bounds phi(x)/h(x) on the Gaussian upper tail.

Every bound here has the shape

    h_k(x) = x + 1/(x + 2/(x + ... + (k-1)/(x + k/g_k(x))))

for some positive terminal ``g_k`` (``h_0 = g_0``), except the five named
closed forms which are kept as their own formulas.  Whether phi/h lies above
or below 1 - Phi is fixed by the family and the parity of ``k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import constants
from .ext import ExtReal, PI, RealLike, ctx, ext
from .oracle import gaussian_density

MAX_ORDER = 1000


class DomainError(ValueError):
    """Argument outside the domain on which a bound is defined."""


class Family(enum.Enum):
    CLASSIC_CF = "classic-cf"
    SHENTON = "shenton"
    SQRT_STAR = "sqrt-star"
    RATIONAL_STAR = "rational-star"
    EXP_STAR = "exp-star"
    KOMATU_LOWER = "komatu-lower"
    KOMATU_UPPER = "komatu-upper"
    POLLAK = "pollak"
    SAMPFORD = "sampford"
    LB1 = "lb1"

    @property
    def is_named(self) -> bool:
        return self in NAMED_FAMILIES

    @property
    def is_star(self) -> bool:
        return self in STAR_FAMILIES


NAMED_FAMILIES = frozenset(
    {Family.KOMATU_LOWER, Family.KOMATU_UPPER, Family.POLLAK, Family.SAMPFORD, Family.LB1}
)
STAR_FAMILIES = (Family.SQRT_STAR, Family.RATIONAL_STAR, Family.EXP_STAR)
ORDERED_FAMILIES = (Family.CLASSIC_CF, Family.SHENTON) + STAR_FAMILIES


class Side(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BoundId:
    """One bound: a family, a depth ``order`` and, for Shenton, ``j`` in {1, 2}.

    Named closed forms carry no order; it is normalized to 0.
    """

    family: Family
    order: int = 0
    j: int | None = None

    def __post_init__(self) -> None:
        if isinstance(self.order, bool) or int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a nonnegative integer, got {self.order!r}")
        if self.order > MAX_ORDER:
            raise ValueError(f"order {self.order} exceeds the cap {MAX_ORDER}")
        if self.family is Family.SHENTON:
            if self.j not in (1, 2):
                raise ValueError(f"Shenton bounds need j in {{1, 2}}, got {self.j!r}")
        elif self.j is not None:
            raise ValueError(f"j only applies to Shenton bounds, not {self.family.value}")
        if self.family.is_named:
            object.__setattr__(self, "order", 0)

    @classmethod
    def parse(cls, text: str) -> "BoundId":
        """Parse ``family[:k]`` such as ``sqrt-star:3``, ``shenton-j2:4`` or ``pollak``."""
        name, _, order = text.strip().partition(":")
        j = None
        if name.startswith("shenton-j"):
            j_text = name[len("shenton-j"):]
            if j_text not in ("1", "2"):
                raise ValueError(f"unknown Shenton variant {name!r}")
            name, j = "shenton", int(j_text)
        try:
            family = Family(name)
        except ValueError:
            raise ValueError(f"unknown bound family {name!r}") from None
        if family.is_named:
            if order:
                raise ValueError(f"{name} is a closed form and takes no order")
            return cls(family)
        if not order:
            raise ValueError(f"{name} needs an order, e.g. {name}:2")
        return cls(family, int(order), j)

    def __str__(self) -> str:
        if self.family.is_named:
            return self.family.value
        name = self.family.value if self.j is None else f"shenton-j{self.j}"
        return f"{name}:{self.order}"


def _nonneg(x: RealLike) -> ExtReal:
    x = ext(x)
    if x < 0:
        raise DomainError(f"bounds are defined for x >= 0, got x = {ctx.nstr(x, 17)}")
    return x


def terminal_g(family: Family, k: int, x: RealLike, j: int | None = None) -> ExtReal:
    """Terminal seed g_k(x) closing the depth-k fraction."""
    x = _nonneg(x)
    if family is Family.CLASSIC_CF:
        if x == 0:
            raise DomainError("the classic convergents need x > 0")
        return x
    if family is Family.SHENTON:
        if j not in (1, 2):
            raise ValueError(f"Shenton bounds need j in {{1, 2}}, got {j!r}")
        return ctx.sqrt(k + ctx.mpf(j) / 2 + (x / 2) ** 2) + x / 2
    if family is Family.SQRT_STAR:
        c = constants.c_star(k)
        return ctx.sqrt(c + (x / 2) ** 2) + x / 2
    if family is Family.RATIONAL_STAR:
        c = constants.c_star(k)
        return ctx.sqrt(c) + (c - k) * x
    if family is Family.EXP_STAR:
        c = constants.c_star(k)
        return x + ctx.sqrt(c) * ctx.exp(-constants.delta_k(k) * x)
    raise ValueError(f"{family.value} is a closed form without a terminal seed")


def continued_fraction_h(k: int, x: RealLike, g_terminal: ExtReal) -> ExtReal:
    """Evaluate x + 1/(x + 2/(... x + k/g)) by backward recurrence."""
    x = _nonneg(x)
    if not g_terminal > 0:
        raise DomainError(f"terminal value must be positive, got {g_terminal}")
    r = ext(g_terminal)
    for i in range(k, 0, -1):
        r = x + i / r
    if not ctx.isfinite(r):
        raise ArithmeticError(f"non-finite continued fraction value at k={k}")
    return r


def _named_h(family: Family, x: ExtReal) -> ExtReal:
    if family is Family.KOMATU_LOWER:
        return (ctx.sqrt(4 + x * x) + x) / 2
    if family is Family.KOMATU_UPPER:
        return (ctx.sqrt(2 + x * x) + x) / 2
    if family is Family.POLLAK:
        return (ctx.sqrt(8 / PI + x * x) + x) / 2
    if family is Family.SAMPFORD:
        return (ctx.sqrt(8 + x * x) + 3 * x) / 4
    if family is Family.LB1:
        return ((PI - 1) * x + ctx.sqrt(2 * PI + x * x)) / PI
    raise AssertionError(family)


def eval_h(bound: BoundId, x: RealLike) -> ExtReal:
    """The denominator h(x) of the bound phi(x)/h(x)."""
    x = _nonneg(x)
    if bound.family.is_named:
        return _named_h(bound.family, x)
    g = terminal_g(bound.family, bound.order, x, bound.j)
    return continued_fraction_h(bound.order, x, g)


def bound_side(bound: BoundId) -> Side:
    """Which side of 1 - Phi the bound lies on for x > 0."""
    family, even = bound.family, bound.order % 2 == 0
    if family in (Family.KOMATU_LOWER, Family.LB1):
        return Side.LOWER
    if family in (Family.KOMATU_UPPER, Family.POLLAK, Family.SAMPFORD):
        return Side.UPPER
    if family is Family.SHENTON and bound.j == 2:
        return Side.LOWER if even else Side.UPPER
    return Side.UPPER if even else Side.LOWER


@dataclass(frozen=True)
class TailBound:
    value: ExtReal
    side: Side


def tail_bound(bound: BoundId, x: RealLike) -> TailBound:
    """phi(x)/h(x) together with its side."""
    x = _nonneg(x)
    return TailBound(gaussian_density(x) / eval_h(bound, x), bound_side(bound))


def all_bounds(k_max: int) -> list[BoundId]:
    """Every ordered family for k <= k_max, then the five named bounds."""
    out = []
    for family in ORDERED_FAMILIES:
        for k in range(k_max + 1):
            if family is Family.SHENTON:
                out += [BoundId(family, k, 1), BoundId(family, k, 2)]
            else:
                out.append(BoundId(family, k))
    out += [BoundId(f) for f in Family if f.is_named]
    return out
