import pytest

from mills_bounds import analysis as A
from mills_bounds.constants import x_star, x_tilde
from mills_bounds.ext import ctx, ext, relative_error
from mills_bounds.families import BoundId, DomainError, Family

SQRT = lambda k: BoundId(Family.SQRT_STAR, k)  # noqa: E731
RAT = lambda k: BoundId(Family.RATIONAL_STAR, k)  # noqa: E731
EXP = lambda k: BoundId(Family.EXP_STAR, k)  # noqa: E731


def independent_exp0_error(mp):
    """Delta for the order-0 exponential bound, built from scratch in mpmath."""
    c = 2 / mp.pi
    d = (1 - c) / mp.sqrt(c)

    def delta(x):
        h = x + mp.sqrt(c) * mp.exp(-d * x)
        return mp.npdf(x) / h - mp.erfc(x / mp.sqrt(2)) / 2

    return delta


def independent_sqrt_error(k, mp):
    c = 2 / mp.pi
    for i in range(1, k + 1):
        c = i * i / c

    def delta(x):
        r = mp.sqrt(c + (x / 2) ** 2) + x / 2
        for i in range(k, 0, -1):
            r = x + i / r
        return mp.npdf(x) / r - mp.erfc(x / mp.sqrt(2)) / 2

    return delta


def test_pointwise_errors():
    assert abs(A.error_at(SQRT(0), 0)) < ctx.mpf(10) ** -45
    komatu = A.error_at(BoundId(Family.KOMATU_UPPER), 0)
    assert relative_error(komatu, 1 / ctx.sqrt(ctx.pi) - ext("0.5")) < ctx.mpf(10) ** -40
    e = A.error_at(SQRT(1), 1)
    assert e < 0 and abs(e) < ext("3.820e-3")


def test_exponential_order_zero_maximum(mp60):
    delta = independent_exp0_error(mp60)
    xm = mp60.findroot(lambda x: mp60.diff(delta, x), 0.85)
    expected = ext(abs(delta(xm)))
    report = A.max_abs_error(EXP(0))
    assert relative_error(report.max_abs_error, expected) < ctx.mpf(10) ** -12
    assert abs(report.argmax_x - ext(xm)) < ext("1e-7")
    assert A.round_sig(report.max_abs_error) == "2.073e-3"


def test_sqrt_order_four_from_two(mp60):
    # x_4 is far below 2, so the maximum on [2, inf) sits at the left end
    expected = ext(abs(independent_sqrt_error(4, mp60)(2)))
    report = A.max_abs_error(SQRT(4), 2)
    assert report.argmax_x == 2
    assert relative_error(report.max_abs_error, expected) < ctx.mpf(10) ** -30
    assert A.round_sig(report.max_abs_error) == "1.342e-6"


@pytest.mark.parametrize("k", [0, 3, 9])
def test_argmax_matches_closed_forms(k):
    assert relative_error(A.max_abs_error(SQRT(k), scan=False).argmax_x, x_star(k)) < ext("1e-6")
    assert relative_error(A.max_abs_error(RAT(k), scan=False).argmax_x, x_tilde(k)) < ext("1e-6")


@pytest.mark.parametrize("k", [0, 1, 5, 20])
def test_error_cap(k):
    report = A.max_abs_error(SQRT(k), scan=False)
    assert report.cap == A.error_cap(k) and report.under_cap


def test_error_cap_example():
    assert A.error_cap(0) == ext(1) / 8


def test_classic_from_zero_is_rejected():
    with pytest.raises(DomainError):
        A.max_abs_error(BoundId(Family.CLASSIC_CF, 2), 0)
    assert A.max_abs_error(BoundId(Family.CLASSIC_CF, 2), 3).argmax_x == 3


def test_golden_section_on_a_parabola():
    x, v = A.golden_section_max(lambda t: -(t - ext("0.3")) ** 2, 0, 1)
    assert abs(x - ext("0.3")) < ext("1e-17") and v <= 0
    x, _ = A.golden_section_max(lambda t: t, 0, 1)
    assert x == 1


@pytest.mark.parametrize(
    "value, up, nearest",
    [
        ("2.0725487e-3", "2.073e-3", "2.073e-3"),
        ("1.5700001e-2", "1.571e-2", "1.570e-2"),
        ("9.99999e-5", "1.000e-4", "1.000e-4"),
        ("3.55e-5", "3.550e-5", "3.550e-5"),
    ],
)
def test_round_sig(value, up, nearest):
    assert A.round_sig(ext(value), 4, "up") == up
    assert A.round_sig(ext(value), 4, "nearest") == nearest
    assert A.parse_sig(up) >= ext(value)


def test_round_sig_needs_positive():
    with pytest.raises(ValueError):
        A.round_sig(ext(0))


def test_bracketing_small_sweep():
    from mills_bounds.families import all_bounds

    res = A.verify_bracketing(all_bounds(3), A.log_grid("1e-3", 10, 40))
    assert res.ok and res.checked == 40 * len(all_bounds(3))


@pytest.mark.parametrize("family", [Family.SQRT_STAR, Family.RATIONAL_STAR, Family.EXP_STAR])
def test_chain_small_sweep(family):
    res = A.verify_chain(family, 6, A.log_grid("1e-3", 10, 60))
    assert res.ok, res.first_violation


def test_rational_chain_single_point():
    e0, e2 = A.error_at(RAT(0), 5), A.error_at(RAT(2), 5)
    assert e0 > e2 > 0
    assert A.verify_chain(Family.RATIONAL_STAR, 2, [5]).ok


def test_chain_rejects_named_family():
    with pytest.raises(ValueError):
        A.verify_chain(Family.POLLAK, 4, [1])


@pytest.mark.parametrize(
    "bound",
    [SQRT(2), SQRT(5), RAT(1), RAT(4), EXP(0), EXP(3), BoundId(Family.CLASSIC_CF, 0), BoundId(Family.LB1)],
)
def test_derivative_sign_pattern(bound):
    res = A.verify_sign_pattern(bound, A.log_grid("1e-2", 8, 80))
    assert res.ok, res.first_violation
    assert res.checked > 60


def test_sign_pattern_detects_a_wrong_prediction(monkeypatch):
    monkeypatch.setattr(A, "derivative_pattern", lambda b: (None, 1))
    assert not A.verify_sign_pattern(SQRT(2), [ext("0.1"), ext(3)]).ok


@pytest.mark.parametrize("k, limit", [(0, "3.2"), (1, "3"), (5, "3"), (20, "3")])
def test_crossover(k, limit):
    assert A.crossover_exp_vs_sqrt(k) <= ext(limit)


def test_crossover_direct_errors():
    assert abs(A.error_at(SQRT(5), 4)) < abs(A.error_at(EXP(5), 4))


def test_curve_shape():
    table = A.curve_dump([SQRT(1)], A.linear_grid(0, 1, 2))
    assert table.header == ["x", "sqrt-star:1"]
    rows = table.rows(20)
    assert len(rows) == 2 and all(len(r) == 2 for r in rows)
    assert rows[0][0] == "0.0"


def test_curve_rejects_classic_at_zero():
    with pytest.raises(DomainError):
        A.curve_dump([BoundId(Family.CLASSIC_CF, 1)], A.linear_grid(0, 1, 3))


def test_grid_validation():
    with pytest.raises(ValueError):
        A.GridSpec(1, 1, 5)
    with pytest.raises(ValueError):
        A.GridSpec(0, 1, 5, A.Spacing.LOG)
    with pytest.raises(ValueError):
        A.GridSpec(0, 1, 1)
    xs = A.log_grid("1e-3", 10, 5).values()
    assert xs[0] == ext("1e-3") and xs[-1] == 10
    assert relative_error(xs[1], ext("1e-2")) < ctx.mpf(10) ** -40


def test_figure_sets_reference_valid_bounds():
    assert set(A.FIGURE_SETS) == {"fig1", "fig2", "fig3", "fig4", "fig5"}
    assert all(len(v) > 0 for v in A.FIGURE_SETS.values())


@pytest.mark.slow
def test_error_columns_decrease_with_order():
    table = A.reproduce_table1(scan=False)
    for col in range(5):
        column = [row[col].value for row in table.cells]
        assert all(a > b for a, b in zip(column, column[1:]))
