"""Error curves, maxima and ordering checks for the tail bounds.

The approximation error of a bound is Delta(x) = phi(x)/h(x) - (1 - Phi(x)).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from . import constants
from .ext import ExtReal, RealLike, ctx, ext, fmt
from .families import (
    STAR_FAMILIES,
    BoundId,
    DomainError,
    Family,
    Side,
    bound_side,
    eval_h,
    tail_bound,
    terminal_g,
)
from .oracle import gaussian_density, upper_tail

SEARCH_HIGH = 10
GOLDEN_WIDTH = ctx.mpf(10) ** -18
SCAN_LOW = ctx.mpf(10) ** -4
SCAN_POINTS = 10_000
SCAN_AGREEMENT = ctx.mpf(10) ** -4
TAIL_NEGLIGIBLE = ctx.mpf(10) ** -23


class AnalysisError(RuntimeError):
    """A numerical procedure failed its own consistency check."""


class Spacing(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class GridSpec:
    low: float | str
    high: float | str
    points: int
    spacing: Spacing = Spacing.LINEAR

    def __post_init__(self) -> None:
        if not ext(self.low) < ext(self.high):
            raise ValueError(f"grid needs low < high, got [{self.low}, {self.high}]")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        if self.spacing is Spacing.LOG and not ext(self.low) > 0:
            raise ValueError("log spacing needs low > 0")

    def values(self) -> tuple[ExtReal, ...]:
        return _grid_values(self)


@lru_cache(maxsize=64)
def _grid_values(grid: GridSpec) -> tuple[ExtReal, ...]:
    low, high, n = ext(grid.low), ext(grid.high), grid.points
    if grid.spacing is Spacing.LOG:
        ratio = high / low
        xs = [low * ctx.power(ratio, ctx.mpf(i) / (n - 1)) for i in range(n - 1)]
    else:
        step = (high - low) / (n - 1)
        xs = [low + i * step for i in range(n - 1)]
    return tuple(xs) + (high,)


def log_grid(low: RealLike, high: RealLike, points: int) -> GridSpec:
    return GridSpec(str(low), str(high), points, Spacing.LOG)


def linear_grid(low: RealLike, high: RealLike, points: int) -> GridSpec:
    return GridSpec(str(low), str(high), points, Spacing.LINEAR)


# ---------------------------------------------------------------------------
# pointwise errors


def error_at(bound: BoundId, x: RealLike) -> ExtReal:
    """Signed error phi(x)/h(x) - (1 - Phi(x))."""
    x = ext(x)
    return tail_bound(bound, x).value - upper_tail(x)


def _abs_error(bound: BoundId) -> Callable[[ExtReal], ExtReal]:
    return lambda x: abs(error_at(bound, x))


# ---------------------------------------------------------------------------
# maxima


def golden_section_max(
    f: Callable[[ExtReal], ExtReal], a: RealLike, b: RealLike, width: RealLike = GOLDEN_WIDTH
) -> tuple[ExtReal, ExtReal]:
    """Maximize a unimodal ``f`` on [a, b]; returns (argmax, max).

    Stops once the bracket is narrower than ``width``.  Endpoints are
    compared at the end so a monotone ``f`` returns its boundary maximum.
    """
    a, b, width = ext(a), ext(b), ext(width)
    inv_phi = (ctx.sqrt(5) - 1) / 2
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > width:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
    best = max([(f1, x1), (f2, x2), (f(a), a), (f(b), b)], key=lambda t: t[0])
    return best[1], best[0]


def error_cap(k: int) -> ExtReal:
    """1/(32 (k + 1/2)^2)."""
    return 1 / (32 * (k + ctx.mpf(1) / 2) ** 2)


@dataclass(frozen=True)
class ErrorReport:
    bound: BoundId
    domain_low: ExtReal
    argmax_x: ExtReal
    max_abs_error: ExtReal
    cap: ExtReal | None = None
    scan_max: ExtReal | None = None

    @property
    def under_cap(self) -> bool | None:
        return None if self.cap is None else self.max_abs_error < self.cap


SCAN_GRID = GridSpec(str(SCAN_LOW), str(SEARCH_HIGH), SCAN_POINTS, Spacing.LOG)


@lru_cache(maxsize=256)
def _scan_abs_errors(bound: BoundId) -> tuple[ExtReal, ...]:
    return tuple(abs(error_at(bound, x)) for x in SCAN_GRID.values())


def scan_max(bound: BoundId, domain_low: RealLike = 0) -> tuple[ExtReal, ExtReal]:
    """Brute-force max of |Delta| over the shared 10^4-point log grid on [domain_low, 10].

    ``domain_low`` itself is added as a sample when it lies inside the bound's
    domain.  Returns (argmax, max).
    """
    domain_low = ext(domain_low)
    samples = [
        (err, x)
        for x, err in zip(SCAN_GRID.values(), _scan_abs_errors(bound))
        if x >= domain_low
    ]
    if domain_low > 0 or bound.family is not Family.CLASSIC_CF:
        samples.append((abs(error_at(bound, domain_low)), domain_low))
    err, x = max(samples, key=lambda t: t[0])
    return x, err


def max_abs_error(bound: BoundId, domain_low: RealLike = 0, scan: bool = True) -> ErrorReport:
    """Maximal |Delta| over x >= domain_low.

    |Delta| has at most one interior turning point, so golden-section search on
    [domain_low, 10] finds the maximum; beyond 10 the error is below 1e-23
    (checked).  With ``scan`` the result is confirmed against a dense grid.
    """
    domain_low = ext(domain_low)
    if domain_low < 0:
        raise DomainError("domain_low must be >= 0")
    if bound.family is Family.CLASSIC_CF and domain_low == 0:
        raise DomainError("classic convergents blow up at 0; their sup over x > 0 is not attained")
    f = _abs_error(bound)
    tail_error = f(ext(SEARCH_HIGH))
    if not tail_error < TAIL_NEGLIGIBLE:
        raise AnalysisError(f"|Delta(10)| = {fmt(tail_error, 5)} for {bound}; search bracket too short")
    if domain_low >= SEARCH_HIGH:
        argmax, best = domain_low, f(domain_low)
    else:
        argmax, best = golden_section_max(f, domain_low, SEARCH_HIGH)
    cap = error_cap(bound.order) if bound.family is Family.SQRT_STAR else None
    grid_best = None
    if scan:
        _, grid_best = scan_max(bound, domain_low)
        if grid_best > best * (1 + ctx.mpf(10) ** -30):
            raise AnalysisError(f"grid scan beats golden section for {bound}: {grid_best} > {best}")
        if (best - grid_best) > SCAN_AGREEMENT * best:
            raise AnalysisError(f"grid scan and golden section disagree for {bound}")
    return ErrorReport(bound, domain_low, argmax, best, cap, grid_best)


# ---------------------------------------------------------------------------
# Maximal-error table

TABLE1_DOMAINS = (0, 0, 1, 2, 3)
TABLE1_COLUMNS = ("exp_star_x>0", "sqrt_star_x>0", "sqrt_star_x>=1", "sqrt_star_x>=2", "sqrt_star_x>=3")

# reference maxima to 4 significant digits, rows k = 0..7
REFERENCE_TABLE1: tuple[tuple[str, ...], ...] = (
    ("2.074e-3", "1.571e-2", "9.194e-3", "9.374e-4", "3.550e-5"),
    ("4.796e-4", "3.820e-3", "1.606e-3", "1.041e-4", "2.612e-6"),
    ("1.723e-4", "1.622e-3", "4.687e-4", "1.896e-5", "3.175e-7"),
    ("7.888e-5", "8.735e-4", "1.764e-4", "4.591e-6", "5.226e-8"),
    ("4.214e-5", "5.433e-4", "7.775e-5", "1.342e-6", "1.059e-8"),
    ("2.499e-5", "3.685e-4", "3.814e-5", "4.480e-7", "2.497e-9"),
    ("1.599e-5", "2.663e-4", "2.023e-5", "1.655e-7", "6.625e-10"),
    ("1.082e-5", "2.010e-4", "1.138e-5", "6.616e-8", "1.932e-10"),
)


def round_sig(value: ExtReal, digits: int = 4, mode: str = "up") -> str:
    """Round a positive value to ``digits`` significant digits.

    ``mode`` is ``"up"`` (ceiling) or ``"nearest"``.  Output looks like
    ``2.074e-3``.
    """
    if not value > 0:
        raise ValueError("round_sig expects a positive value")
    exponent = int(ctx.floor(ctx.log10(value)))
    scaled = value / ctx.mpf(10) ** (exponent - digits + 1)
    if scaled >= 10**digits:
        exponent += 1
        scaled /= 10
    elif scaled < 10 ** (digits - 1):
        exponent -= 1
        scaled *= 10
    mantissa = int(ctx.ceil(scaled)) if mode == "up" else int(ctx.nint(scaled))
    if mantissa == 10**digits:
        mantissa //= 10
        exponent += 1
    text = str(mantissa)
    return f"{text[0]}.{text[1:]}e{exponent}"


def parse_sig(text: str) -> ExtReal:
    """Inverse of :func:`round_sig` (any decimal literal works)."""
    return ctx.mpf(text)


@dataclass(frozen=True)
class Table1Cell:
    k: int
    column: str
    value: ExtReal
    rounded_up: str
    rounded_nearest: str
    reference: str

    @property
    def matches(self) -> bool:
        return self.rounded_up == self.reference


@dataclass(frozen=True)
class Table1:
    cells: tuple[tuple[Table1Cell, ...], ...]

    @property
    def all_match(self) -> bool:
        return all(cell.matches for row in self.cells for cell in row)

    def mismatches(self) -> list[Table1Cell]:
        return [cell for row in self.cells for cell in row if not cell.matches]


def table1_bounds(k: int) -> tuple[BoundId, ...]:
    return (BoundId(Family.EXP_STAR, k),) + (BoundId(Family.SQRT_STAR, k),) * 4


def reproduce_table1(k_max: int = 7, scan: bool = True) -> Table1:
    rows = []
    for k in range(k_max + 1):
        row = []
        for col, (bound, low) in enumerate(zip(table1_bounds(k), TABLE1_DOMAINS)):
            report = max_abs_error(bound, low, scan=scan)
            ref = REFERENCE_TABLE1[k][col] if k < len(REFERENCE_TABLE1) else ""
            row.append(
                Table1Cell(
                    k=k,
                    column=TABLE1_COLUMNS[col],
                    value=report.max_abs_error,
                    rounded_up=round_sig(report.max_abs_error, 4, "up"),
                    rounded_nearest=round_sig(report.max_abs_error, 4, "nearest"),
                    reference=ref,
                )
            )
        rows.append(tuple(row))
    return Table1(tuple(rows))


# ---------------------------------------------------------------------------
# orderings


@dataclass
class CheckResult:
    """Outcome of a pointwise check over a grid."""

    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first_violation(self) -> str | None:
        return self.violations[0] if self.violations else None

    def fail(self, message: str) -> None:
        self.violations.append(message)


def _positive_points(grid: GridSpec | Iterable[RealLike]) -> list[ExtReal]:
    xs = grid.values() if isinstance(grid, GridSpec) else [ext(x) for x in grid]
    return [x for x in xs if x > 0]


def verify_chain(family: Family, k_max: int, grid: GridSpec | Iterable[RealLike]) -> CheckResult:
    """Check the even/odd error chains of a star family at every grid point.

    Even orders must satisfy Delta_0 > Delta_2 > ... > 0 and odd orders
    Delta_1 < Delta_3 < ... < 0.  The exponential family is also checked to
    beat the rational family pointwise, and the rational family to lose to
    the square-root family beyond its maximizer.
    """
    if family not in STAR_FAMILIES:
        raise ValueError(f"chains are defined for the star families, not {family.value}")
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    result = CheckResult(f"chain[{family.value}, k<={k_max}]")
    ks = range(k_max + 1)
    tilde = [constants.x_tilde(k) for k in ks]
    for x in _positive_points(grid):
        errors = [error_at(BoundId(family, k), x) for k in ks]
        result.checked += 1
        for parity, sign in ((0, 1), (1, -1)):
            chain = errors[parity::2]
            for i in range(len(chain) - 1):
                if not sign * chain[i] > sign * chain[i + 1]:
                    k = parity + 2 * i
                    result.fail(f"x={fmt(x, 8)}: Delta_{k} vs Delta_{k + 2} out of order")
            if not sign * chain[-1] > 0:
                result.fail(f"x={fmt(x, 8)}: last order of parity {parity} has the wrong sign")
        if family is Family.EXP_STAR:
            for k in ks:
                rational = error_at(BoundId(Family.RATIONAL_STAR, k), x)
                if not abs(errors[k]) < abs(rational):
                    result.fail(f"x={fmt(x, 8)}: |exp error| >= |rational error| at k={k}")
        if family is Family.RATIONAL_STAR:
            for k in ks:
                if x > tilde[k]:
                    sqrt_err = error_at(BoundId(Family.SQRT_STAR, k), x)
                    if not abs(errors[k]) > abs(sqrt_err):
                        result.fail(f"x={fmt(x, 8)}: |rational error| <= |sqrt error| past x~ at k={k}")
    return result


def verify_bracketing(bounds: Sequence[BoundId], grid: GridSpec | Iterable[RealLike]) -> CheckResult:
    """Every bound must sit strictly on its declared side of 1 - Phi at x > 0."""
    result = CheckResult(f"bracketing[{len(bounds)} bounds]")
    for x in _positive_points(grid):
        truth = upper_tail(x)
        phi = gaussian_density(x)
        for bound in bounds:
            value = phi / eval_h(bound, x)
            result.checked += 1
            side = bound_side(bound)
            if (side is Side.UPPER and not value > truth) or (side is Side.LOWER and not value < truth):
                result.fail(f"{bound} at x={fmt(x, 8)} is not a strict {side} bound")
    return result


# ---------------------------------------------------------------------------
# derivative sign pattern


def exp_turning_point(k: int) -> ExtReal:
    """Positive root of f(x) = delta + x + sqrt(c) e^{-delta x} - (k+1) e^{delta x}/sqrt(c).

    f vanishes at 0, is strictly concave and rises first, so it has exactly
    one positive root.
    """
    c, d = constants.c_star(k), constants.delta_k(k)
    rc = ctx.sqrt(c)

    def f(x):
        return d + x + rc * ctx.exp(-d * x) - (k + 1) * ctx.exp(d * x) / rc

    hi = ctx.mpf(1)
    while f(hi) > 0:
        hi *= 2
    return _bisect(f, hi / 2 if hi > 1 else ctx.mpf(10) ** -6, hi, ctx.mpf(10) ** -30)


def _bisect(f: Callable[[ExtReal], ExtReal], lo: ExtReal, hi: ExtReal, tol: ExtReal) -> ExtReal:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise AnalysisError(f"no sign change on [{fmt(lo, 6)}, {fmt(hi, 6)}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


# bound -> (equivalent star bound whose turning point applies | None, constant sign)
def derivative_pattern(bound: BoundId) -> tuple[ExtReal | None, int]:
    """Predicted shape of sign(Delta'(x)) on x > 0.

    Returns ``(turning_point, sign)``: when ``turning_point`` is ``None`` the
    sign is constant; otherwise sign(Delta') = sign * sign(turning_point - x).
    """
    family, k = bound.family, bound.order
    parity = 1 if k % 2 == 0 else -1
    if family is Family.POLLAK:
        return derivative_pattern(BoundId(Family.SQRT_STAR, 0))
    if family is Family.LB1:
        return derivative_pattern(BoundId(Family.SQRT_STAR, 1))
    if family is Family.KOMATU_LOWER:
        return derivative_pattern(BoundId(Family.SHENTON, 0, 2))
    if family is Family.KOMATU_UPPER:
        return derivative_pattern(BoundId(Family.SHENTON, 0, 1))
    if family is Family.SAMPFORD:
        return derivative_pattern(BoundId(Family.SHENTON, 1, 2))
    if family is Family.CLASSIC_CF:
        return None, -parity
    if family is Family.SHENTON:
        return None, parity if bound.j == 2 else -parity
    if family is Family.SQRT_STAR:
        return constants.x_star(k), parity
    if family is Family.RATIONAL_STAR:
        return constants.x_tilde(k), parity
    return exp_turning_point(k), parity


def verify_sign_pattern(
    bound: BoundId, grid: GridSpec | Iterable[RealLike], exclusion: RealLike = "1e-3"
) -> CheckResult:
    """Central-difference signs of Delta' against the predicted pattern.

    Step is 1e-6 * max(1, x); points within ``exclusion`` of the turning
    point are skipped.
    """
    exclusion = ext(exclusion)
    turning, sign = derivative_pattern(bound)
    result = CheckResult(f"sign-pattern[{bound}]")
    for x in _positive_points(grid):
        if turning is not None and abs(x - turning) < exclusion:
            result.skipped += 1
            continue
        step = ctx.mpf(10) ** -6 * max(1, x)
        if x - step <= 0:
            result.skipped += 1
            continue
        slope = (error_at(bound, x + step) - error_at(bound, x - step)) / (2 * step)
        expected = sign if turning is None else sign * (1 if x < turning else -1)
        result.checked += 1
        if slope == 0 or (slope > 0) != (expected > 0):
            result.fail(f"{bound}: Delta' has the wrong sign at x={fmt(x, 8)}")
    return result


# ---------------------------------------------------------------------------
# exponential vs square-root crossover


def crossover_exp_vs_sqrt(k: int, check_points: int = 200) -> ExtReal:
    """Point beyond which the square-root bound beats the exponential bound.

    Root of exp(delta_k x) sqrt(c_k*) - (sqrt(c_k* + (x/2)^2) + x/2) on
    [0.1, 20], bisected to 1e-8; the inequality is then confirmed on a grid
    up to 20.
    """
    c, d = constants.c_star(k), constants.delta_k(k)
    rc = ctx.sqrt(c)

    def f(x):
        return ctx.exp(d * x) * rc - terminal_g(Family.SQRT_STAR, k, x)

    root = _bisect(f, ctx.mpf("0.1"), ctx.mpf(20), ctx.mpf(10) ** -8)
    upper = ctx.mpf(20)
    for i in range(1, check_points + 1):
        x = root + (upper - root) * i / check_points
        if not f(x) > 0:
            raise AnalysisError(f"crossover condition fails again at x={fmt(x, 8)} for k={k}")
    return root


# ---------------------------------------------------------------------------
# curves

FIGURE_SETS: dict[str, tuple[BoundId, ...]] = {
    "fig1": tuple(BoundId(f) for f in (Family.KOMATU_LOWER, Family.LB1, Family.POLLAK, Family.SAMPFORD)),
    "fig2": tuple(BoundId(Family.SQRT_STAR, k) for k in range(10)),
    "fig3": tuple(BoundId(Family.RATIONAL_STAR, k) for k in range(10)),
    "fig4": tuple(BoundId(f, k) for k in range(4, 12) for f in (Family.SQRT_STAR, Family.RATIONAL_STAR)),
    "fig5": tuple(BoundId(Family.EXP_STAR, k) for k in range(10)),
}


@dataclass(frozen=True)
class CurveTable:
    bounds: tuple[BoundId, ...]
    xs: tuple[ExtReal, ...]
    errors: tuple[tuple[ExtReal, ...], ...]

    @property
    def header(self) -> list[str]:
        return ["x"] + [str(b) for b in self.bounds]

    def rows(self, digits: int = 20) -> list[list[str]]:
        return [
            [fmt(x, digits)] + [fmt(e, digits) for e in errs]
            for x, errs in zip(self.xs, self.errors)
        ]


def curve_dump(bounds: Sequence[BoundId], grid: GridSpec) -> CurveTable:
    """Delta(x) for each bound at each grid point."""
    xs = grid.values()
    for bound in bounds:
        if bound.family is Family.CLASSIC_CF and xs[0] <= 0:
            raise DomainError("classic convergents need a grid with x > 0")
    errors = tuple(tuple(error_at(b, x) for b in bounds) for x in xs)
    return CurveTable(tuple(bounds), xs, errors)
