"""Invariant suites run by ``mills-bounds verify`` and the acceptance tests.

Each suite is a zero-argument-beyond-config function returning a
:class:`SuiteResult`.  Suites are independent, so :func:`run_suites` may fan
them out over worker processes; results always come back in declaration
order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import analysis, constants, polynomials
from .analysis import GridSpec, log_grid, linear_grid
from .ext import ExtReal, SQRT_2_OVER_PI, ctx, fmt, relative_error
from .families import (
    STAR_FAMILIES,
    BoundId,
    Family,
    all_bounds,
    continued_fraction_h,
    eval_h,
    tail_bound,
    terminal_g,
)
from .oracle import gaussian_density, upper_tail, upper_tail_cf, upper_tail_series

THREADS_ENV = "MILLS_BOUNDS_THREADS"


@dataclass(frozen=True)
class SuiteConfig:
    k_max: int = 10
    points: int = 2000


@dataclass(frozen=True)
class SuiteResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def _tol(exponent: int) -> ExtReal:
    return ctx.mpf(10) ** exponent


def _from_check(name: str, check: analysis.CheckResult) -> SuiteResult:
    if check.ok:
        return SuiteResult(name, True, f"{check.checked} checks, 0 violations")
    return SuiteResult(
        name, False, f"{len(check.violations)} violations; first: {check.first_violation}"
    )


def bracketing_grid(cfg: SuiteConfig) -> GridSpec:
    return log_grid("1e-3", 10, cfg.points)


# ---------------------------------------------------------------------------
# oracle


def oracle_dual_method(cfg: SuiteConfig) -> SuiteResult:
    worst = ctx.mpf(0)
    for i in range(1, 31):
        x = ctx.mpf(i) / 10
        worst = max(worst, relative_error(upper_tail_cf(x, rel_tol="1e-30"), upper_tail_series(x)))
    return SuiteResult(
        "oracle series vs continued fraction on [0.1, 3.0]",
        worst <= _tol(-25),
        f"max relative gap {fmt(worst, 3)} (limit 1e-25)",
    )


def oracle_derivative(cfg: SuiteConfig) -> SuiteResult:
    worst = ctx.mpf(0)
    for i in range(0, 41):
        x = ctx.mpf(i) / 4 - 2
        step = _tol(-6)
        slope = (upper_tail(x + step) - upper_tail(x - step)) / (2 * step)
        worst = max(worst, relative_error(slope, -gaussian_density(x)))
    return SuiteResult(
        "oracle d/dx(1 - Phi) = -phi on [-2, 8]",
        worst <= _tol(-10),
        f"max relative gap {fmt(worst, 3)} (limit 1e-10)",
    )


def oracle_shape(cfg: SuiteConfig) -> SuiteResult:
    xs = [ctx.mpf(i) / 8 for i in range(1, 161)]
    tails = [upper_tail(x) for x in xs]
    decreasing = all(a > b for a, b in zip(tails, tails[1:]))
    complement = max(abs(upper_tail(x) + upper_tail(-x) - 1) for x in xs)
    gordon = all(
        gaussian_density(x) / (x + 1 / x) < t < gaussian_density(x) / x for x, t in zip(xs, tails)
    )
    ok = decreasing and complement <= _tol(-45) and gordon
    return SuiteResult(
        "oracle monotone, complementary, inside Gordon's sandwich",
        ok,
        f"decreasing={decreasing}, max |T(x)+T(-x)-1|={fmt(complement, 3)}, gordon={gordon}",
    )


# ---------------------------------------------------------------------------
# constants


def excess_sandwich(cfg: SuiteConfig) -> SuiteResult:
    start = time.perf_counter()
    bad = [k for k in range(constants.RELIABLE_K_MAX + 1) if not constants.lemma3_check(k).holds]
    elapsed = time.perf_counter() - start
    return SuiteResult(
        "excess sandwich for k = 0..10^4",
        not bad and elapsed < 5,
        f"{len(bad)} failures, {elapsed:.2f} s (limit 5 s)",
    )


def constant_identities(cfg: SuiteConfig) -> SuiteResult:
    problems = []
    for k in range(1, constants.RELIABLE_K_MAX + 1):
        if relative_error(constants.c_star(k) * constants.c_star(k - 1), ctx.mpf(k * k)) > _tol(-25):
            problems.append(f"product identity at k={k}")
            break
    for k in range(201):
        if relative_error(constants.c_star(k), constants.c_star_product_form(k)) > _tol(-20):
            problems.append(f"closed product at k={k}")
            break
    for k in range(1001):
        if relative_error(constants.delta_k(k), constants.delta_k_difference_form(k)) > _tol(-25):
            problems.append(f"delta forms at k={k}")
            break
        if not 2 * constants.x_star(k) < constants.x_tilde(k) < 1:
            problems.append(f"2 x_k < x~_k < 1 at k={k}")
            break
    for k in range(2, 61, 2):
        if not constants.binomial_identity_check(k):
            problems.append(f"central binomial bracket at k={k}")
            break
    return SuiteResult(
        "c_k* product/closed-form/delta/maximizer identities",
        not problems,
        "all hold" if not problems else "; ".join(problems),
    )


# ---------------------------------------------------------------------------
# bound families


def bracketing(cfg: SuiteConfig, k_max: int | None = None) -> SuiteResult:
    k_max = cfg.k_max if k_max is None else k_max
    check = analysis.verify_bracketing(all_bounds(k_max), bracketing_grid(cfg))
    return _from_check(f"bracketing, all families, k <= {k_max}, {cfg.points}-point log grid", check)


def star_exact_at_zero(cfg: SuiteConfig) -> SuiteResult:
    worst = ctx.mpf(0)
    for family in STAR_FAMILIES:
        for k in range(21):
            worst = max(worst, relative_error(eval_h(BoundId(family, k), 0), SQRT_2_OVER_PI))
    return SuiteResult(
        "star families exact at 0 (h(0) = sqrt(2/pi)), k <= 20",
        worst <= _tol(-20),
        f"max relative gap {fmt(worst, 3)}",
    )


def family_relations(cfg: SuiteConfig) -> SuiteResult:
    problems = []
    xs = [ctx.mpf(i) / 20 for i in range(1, 201)]
    for x in xs:
        sampford = eval_h(BoundId(Family.SAMPFORD), x)
        shenton = continued_fraction_h(1, x, ctx.sqrt(2 + (x / 2) ** 2) + x / 2)
        if relative_error(sampford, shenton) > _tol(-20):
            problems.append(f"Sampford != Shenton(j=2, k=1) at x={fmt(x, 6)}")
            break
    for x in xs:
        if not eval_h(BoundId(Family.LB1), x) < eval_h(BoundId(Family.KOMATU_LOWER), x):
            problems.append(f"LB1 h not below Komatu h at x={fmt(x, 6)}")
            break
    for k in range(cfg.k_max + 1):
        xt = constants.x_tilde(k)
        for x in [xt * ctx.mpf(i) / 10 for i in range(1, 10)] + [xt * ctx.mpf(i) / 10 for i in range(11, 60)]:
            rational = terminal_g(Family.RATIONAL_STAR, k, x)
            sqrt_g = terminal_g(Family.SQRT_STAR, k, x)
            if (rational >= sqrt_g) != (x <= xt):
                problems.append(f"terminal interleaving at k={k}, x={fmt(x, 6)}")
                break
        for x in xs:
            if not terminal_g(Family.EXP_STAR, k, x) > terminal_g(Family.RATIONAL_STAR, k, x):
                problems.append(f"exponential terminal not above rational at k={k}, x={fmt(x, 6)}")
                break
    truth = upper_tail(30)
    for bound in all_bounds(cfg.k_max):
        if bound.order == 0 and not bound.family.is_named:
            continue
        gap = relative_error(tail_bound(bound, 30).value, truth)
        if not gap < _tol(-3):
            problems.append(f"{bound} relative gap {fmt(gap, 3)} at x=30")
    return SuiteResult(
        "named-bound identities, terminal orderings, asymptotic exactness",
        not problems,
        "all hold" if not problems else "; ".join(problems[:3]),
    )


def chains(cfg: SuiteConfig) -> SuiteResult:
    details, ok = [], True
    for family in STAR_FAMILIES:
        check = analysis.verify_chain(family, cfg.k_max, bracketing_grid(cfg))
        ok &= check.ok
        details.append(f"{family.value}: {len(check.violations)} violations / {check.checked} points")
    return SuiteResult(f"error chains and cross-family orderings, k <= {cfg.k_max}", ok, "; ".join(details))


def sign_patterns(cfg: SuiteConfig) -> SuiteResult:
    grid = log_grid("1e-3", 6, 120)
    bounds = all_bounds(cfg.k_max)
    bad, checked = [], 0
    for bound in bounds:
        check = analysis.verify_sign_pattern(bound, grid)
        checked += check.checked
        if not check.ok:
            bad.append(check.first_violation)
    return SuiteResult(
        f"derivative sign patterns, k <= {cfg.k_max}",
        not bad,
        f"{checked} finite differences, {len(bad)} bounds off-pattern" + (f"; {bad[0]}" if bad else ""),
    )


# ---------------------------------------------------------------------------
# polynomial forms

REFERENCE_PQ: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    0: ((1,), (0,)),
    1: ((0, 1), (1,)),
    2: ((1, 0, 1), (0, 1)),
    3: ((0, 3, 0, 1), (2, 0, 1)),
    4: ((3, 0, 6, 0, 1), (0, 5, 0, 1)),
    5: ((0, 15, 0, 10, 0, 1), (8, 0, 9, 0, 1)),
    6: ((15, 0, 45, 0, 15, 0, 1), (0, 33, 0, 14, 0, 1)),
    7: ((0, 105, 0, 105, 0, 21, 0, 1), (48, 0, 87, 0, 20, 0, 1)),
    8: ((105, 0, 420, 0, 210, 0, 28, 0, 1), (0, 279, 0, 185, 0, 27, 0, 1)),
}


def pq_coefficients(cfg: SuiteConfig) -> SuiteResult:
    bad = [
        k
        for k, p, q in polynomials.pq_rows(8)
        if (p, q) != REFERENCE_PQ[k]
    ]
    return SuiteResult(
        "reference coefficients P_k, Q_k for k = 0..8",
        not bad,
        "all 9 rows match" if not bad else f"rows {bad} differ",
    )


def cross_representation(cfg: SuiteConfig, k_max: int | None = None) -> SuiteResult:
    k_max = cfg.k_max if k_max is None else k_max
    worst = ctx.mpf(0)
    xs = linear_grid(0, 10, 401).values()
    families = [(Family.CLASSIC_CF, None), (Family.SHENTON, 1), (Family.SHENTON, 2)]
    families += [(f, None) for f in STAR_FAMILIES]
    for family, j in families:
        for k in range(1, k_max + 1):
            for x in xs:
                if family is Family.CLASSIC_CF and x == 0:
                    continue
                g = terminal_g(family, k, x, j)
                worst = max(
                    worst,
                    relative_error(polynomials.eval_rational_form(k, x, g), continued_fraction_h(k, x, g)),
                )
    return SuiteResult(
        f"continued fraction vs P/Q rational form, k <= {k_max}",
        worst <= _tol(-20),
        f"max relative gap {fmt(worst, 3)} (limit 1e-20)",
    )


# ---------------------------------------------------------------------------
# maxima


def error_cap(cfg: SuiteConfig, k_max: int = 20) -> SuiteResult:
    over = []
    for k in range(k_max + 1):
        report = analysis.max_abs_error(BoundId(Family.SQRT_STAR, k), 0)
        if not report.under_cap:
            over.append(k)
    return SuiteResult(
        f"max |Delta_k| < 1/(32 (k+1/2)^2), k = 0..{k_max}",
        not over,
        "strict for every k" if not over else f"violated at k = {over}",
    )


def maximizers(cfg: SuiteConfig, k_max: int = 20) -> SuiteResult:
    worst = ctx.mpf(0)
    problems = []
    for k in range(k_max + 1):
        sq = analysis.max_abs_error(BoundId(Family.SQRT_STAR, k), 0, scan=False)
        ra = analysis.max_abs_error(BoundId(Family.RATIONAL_STAR, k), 0, scan=False)
        worst = max(worst, relative_error(sq.argmax_x, constants.x_star(k)))
        worst = max(worst, relative_error(ra.argmax_x, constants.x_tilde(k)))
        if not ra.max_abs_error < sq.max_abs_error:
            problems.append(f"rational max not below sqrt max at k={k}")
    return SuiteResult(
        f"golden-section argmax vs closed forms, k <= {k_max}",
        worst <= _tol(-6) and not problems,
        f"max relative gap {fmt(worst, 3)} (limit 1e-6)" + ("; " + "; ".join(problems) if problems else ""),
    )


def crossover(cfg: SuiteConfig, k_max: int = 20) -> SuiteResult:
    roots = [analysis.crossover_exp_vs_sqrt(k) for k in range(k_max + 1)]
    ok = roots[0] <= ctx.mpf("3.2") and all(r <= 3 for r in roots[1:])
    return SuiteResult(
        f"exp/sqrt crossover roots, k <= {k_max}",
        ok,
        f"root(0) = {fmt(roots[0], 6)}, max root(k>=1) = {fmt(max(roots[1:]), 6)}",
    )


def max_error_consistency(cfg: SuiteConfig) -> SuiteResult:
    """Reference table entries must bound our maxima from above, within one
    unit of the 4th digit of the rounded-up value."""
    table = analysis.reproduce_table1()
    off = []
    for row in table.cells:
        for cell in row:
            ours = analysis.parse_sig(cell.rounded_up)
            ref = analysis.parse_sig(cell.reference)
            ulp = ctx.mpf(10) ** (int(ctx.floor(ctx.log10(ours))) - 3)
            if not (cell.value <= ref and ref - ours <= ulp * ctx.mpf("1.0000001")):
                off.append(f"k={cell.k} {cell.column}")
    exact = sum(cell.matches for row in table.cells for cell in row)
    return SuiteResult(
        "reference entries bound the computed maxima within one final digit",
        not off,
        f"{exact}/40 identical after round-up" + (f"; inconsistent: {off}" if off else ""),
    )


SUITES: dict[str, Callable[[SuiteConfig], SuiteResult]] = {
    "oracle-dual": oracle_dual_method,
    "oracle-derivative": oracle_derivative,
    "oracle-shape": oracle_shape,
    "excess-sandwich": excess_sandwich,
    "constants": constant_identities,
    "pq-coefficients": pq_coefficients,
    "exact-at-zero": star_exact_at_zero,
    "relations": family_relations,
    "bracketing": bracketing,
    "chains": chains,
    "sign-patterns": sign_patterns,
    "cross-representation": cross_representation,
    "error-cap": error_cap,
    "maximizers": maximizers,
    "crossover": crossover,
    "max-error-consistency": max_error_consistency,
}


def _run_one(args: tuple[str, SuiteConfig]) -> SuiteResult:
    name, cfg = args
    start = time.perf_counter()
    try:
        result = SUITES[name](cfg)
    except Exception as exc:  # a crashing suite is a failing suite
        result = SuiteResult(name, False, f"raised {type(exc).__name__}: {exc}")
    return SuiteResult(result.name, result.ok, result.detail, time.perf_counter() - start)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def run_suites(
    cfg: SuiteConfig, names: list[str] | None = None, workers: int | None = None
) -> list[SuiteResult]:
    """Run the named suites (default: all); order of results follows ``names``."""
    names = list(SUITES) if names is None else names
    workers = worker_count() if workers is None else workers
    jobs = [(name, cfg) for name in names]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_one, jobs))
