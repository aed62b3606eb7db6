"""Command-line front end: ``mills-bounds <subcommand> ...``.

Exit codes: 0 success, 1 domain error, 2 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from . import analysis, constants, polynomials, suites
from .analysis import FIGURE_SETS, GridSpec, Spacing
from .ext import ext, fmt
from .families import BoundId, DomainError, Family, eval_h, tail_bound
from .oracle import upper_tail

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 64
MIN_DIGITS, MAX_DIGITS = 6, 25

CLI_FAMILIES = (
    "classic-cf",
    "shenton-j1",
    "shenton-j2",
    "sqrt-star",
    "rational-star",
    "exp-star",
    "komatu-lower",
    "komatu-upper",
    "pollak",
    "sampford",
    "lb1",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _digits(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not MIN_DIGITS <= value <= MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"digits must be in [{MIN_DIGITS}, {MAX_DIGITS}], got {value}")
    return value


def _real(text: str) -> str:
    try:
        ext(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a finite real number: {text!r}") from None
    return text


def _common(p: argparse.ArgumentParser, digits_default: int) -> None:
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument(
        "--digits",
        type=_digits,
        default=digits_default,
        help=f"significant digits in [{MIN_DIGITS}, {MAX_DIGITS}] (default {digits_default})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mills-bounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="evaluate one bound at x")
    p.add_argument("--family", required=True, choices=CLI_FAMILIES)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--x", required=True, type=_real)
    p.add_argument("--side", action="store_true", help="print only the side of the bound")
    _common(p, 17)

    p = sub.add_parser("constants", help="tabulate c_k*, delta_k, x_k, x~_k and excess-sandwich slacks")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--json", dest="format", action="store_const", const="json")
    p.add_argument("--csv", dest="format", action="store_const", const="csv")
    _common(p, 20)

    p = sub.add_parser("poly", help="coefficients of P_k and Q_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--table", action="store_true", help="all rows 0..k in table layout")
    _common(p, 17)

    p = sub.add_parser("table1", help="reproduce the maximal-error table")
    p.add_argument("--no-scan", action="store_true", help="skip the dense-grid confirmation")
    _common(p, 17)

    p = sub.add_parser("curve", help="error curves Delta(x) as CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--bounds", help="comma-separated ids, e.g. sqrt-star:2,pollak")
    group.add_argument("--figure", choices=sorted(FIGURE_SETS))
    p.add_argument("--low", type=_real, required=True)
    p.add_argument("--high", type=_real, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--log", action="store_true", help="logarithmic spacing")
    _common(p, 20)
    p.set_defaults(format="csv")

    p = sub.add_parser("verify", help="run every invariant suite")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--points", type=int, default=2000, help="bracketing/chain grid size")
    p.add_argument("--suite", action="append", choices=sorted(suites.SUITES), help="run only these")
    _common(p, 17)

    p = sub.add_parser("crossover", help="where the square-root bound overtakes the exponential one")
    p.add_argument("--k", type=int, required=True)
    _common(p, 17)
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _emit_rows(out, fmt_name: str, header: list[str], rows: list[list[str]]) -> None:
    if fmt_name == "json":
        json.dump([dict(zip(header, row)) for row in rows], out, indent=2)
        out.write("\n")
    elif fmt_name == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    else:
        widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
        out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
        for row in rows:
            out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n")


def _bound_id(family: str, k: int) -> BoundId:
    if family.startswith("shenton-j"):
        return BoundId(Family.SHENTON, k, int(family[-1]))
    fam = Family(family)
    if fam.is_named:
        if k:
            raise DomainError(f"{family} is a closed form; --k must be 0")
        return BoundId(fam)
    return BoundId(fam, k)


# ---------------------------------------------------------------------------
# commands


def cmd_bound(args, out) -> int:
    bound = _bound_id(args.family, args.k)
    x = ext(args.x)
    tb = tail_bound(bound, x)
    if args.side:
        out.write(f"{tb.side}\n")
        return EXIT_OK
    h = eval_h(bound, x)
    truth = upper_tail(x)
    d = args.digits
    fields = {
        "bound": str(bound),
        "x": fmt(x, d),
        "h": fmt(h, d),
        "bound_value": fmt(tb.value, d),
        "side": str(tb.side),
        "upper_tail": fmt(truth, d),
        "error": fmt(tb.value - truth, d),
    }
    if args.format == "text":
        width = max(map(len, fields))
        for key, value in fields.items():
            out.write(f"{key.ljust(width)}  {value}\n")
    else:
        _emit_rows(out, args.format, list(fields), [list(fields.values())])
    return EXIT_OK


def cmd_constants(args, out) -> int:
    if args.k_max < 0:
        raise DomainError("--k-max must be >= 0")
    d = args.digits
    header = ["k", "c_star", "delta", "x_star", "x_tilde", "slack_lower", "slack_middle", "slack_upper"]
    rows = []
    for k in range(args.k_max + 1):
        rep = constants.lemma3_check(k)
        rows.append(
            [str(k)]
            + [
                fmt(v, d)
                for v in (
                    constants.c_star(k),
                    constants.delta_k(k),
                    constants.x_star(k),
                    constants.x_tilde(k),
                    rep.lower_slack,
                    rep.middle_slack,
                    rep.upper_slack,
                )
            ]
        )
    _emit_rows(out, args.format, header, rows)
    return EXIT_OK


def cmd_poly(args, out) -> int:
    k = args.k
    if not 0 <= k <= polynomials.MAX_DEGREE_INDEX:
        raise DomainError(f"--k must be in [0, {polynomials.MAX_DEGREE_INDEX}]")
    if not args.table:
        p, q = polynomials.pq_polynomials(k)
        if args.format == "text":
            out.write(f"P_{k}(x) = {p}\nQ_{k}(x) = {q}\n")
        else:
            header = ["k", "polynomial"] + [f"c{i}" for i in range(k + 1)]
            rows = [
                [str(k), "P"] + [str(c) for c in p.padded(k + 1)],
                [str(k), "Q"] + [str(c) for c in q.padded(k + 1)],
            ]
            _emit_rows(out, args.format, header, rows)
        return EXIT_OK
    header = ["k"] + [f"a{i}" for i in range(k + 1)] + [f"b{i}" for i in range(max(k, 1))]
    rows = []
    for n, p, q in polynomials.pq_rows(k):
        a = [str(c) for c in p] + [""] * (k + 1 - len(p))
        b = [str(c) for c in q] + [""] * (max(k, 1) - len(q))
        rows.append([str(n)] + a + b)
    _emit_rows(out, args.format, header, rows)
    return EXIT_OK


def cmd_table1(args, out) -> int:
    table = analysis.reproduce_table1(scan=not args.no_scan)
    if args.format == "text":
        header = ["k", "column", "computed", "rounded_up", "reference", "status"]
        rows = [
            [str(c.k), c.column, fmt(c.value, args.digits), c.rounded_up, c.reference, "PASS" if c.matches else "FAIL"]
            for row in table.cells
            for c in row
        ]
        _emit_rows(out, "text", header, rows)
        out.write(f"{40 - len(table.mismatches())}/40 cells match after rounding up\n")
    else:
        header = ["k"] + list(analysis.TABLE1_COLUMNS)
        rows = [[str(row[0].k)] + [c.rounded_up for c in row] for row in table.cells]
        _emit_rows(out, args.format, header, rows)
    return EXIT_OK if table.all_match else EXIT_VERIFY


def _parse_bounds(text: str) -> list[BoundId]:
    try:
        return [BoundId.parse(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def cmd_curve(args, out) -> int:
    bounds = list(FIGURE_SETS[args.figure]) if args.figure else _parse_bounds(args.bounds)
    if not bounds:
        raise DomainError("no bounds given")
    try:
        grid = GridSpec(args.low, args.high, args.points, Spacing.LOG if args.log else Spacing.LINEAR)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    table = analysis.curve_dump(bounds, grid)
    fmt_name = "csv" if args.format == "text" else args.format
    _emit_rows(out, fmt_name, table.header, table.rows(args.digits))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.k_max < 2:
        raise DomainError("--k-max must be >= 2")
    if args.points < 2:
        raise DomainError("--points must be >= 2")
    cfg = suites.SuiteConfig(k_max=args.k_max, points=args.points)
    results = suites.run_suites(cfg, args.suite)
    if args.format == "text":
        for r in results:
            out.write(r.line() + "\n")
        passed = sum(r.ok for r in results)
        out.write(f"{passed}/{len(results)} suites passed\n")
    else:
        header = ["suite", "status", "detail"]
        rows = [[r.name, "pass" if r.ok else "fail", r.detail] for r in results]
        _emit_rows(out, args.format, header, rows)
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


def cmd_crossover(args, out) -> int:
    if not 0 <= args.k <= 20:
        raise DomainError("--k must be in [0, 20]")
    root = analysis.crossover_exp_vs_sqrt(args.k)
    _emit_rows(out, args.format, ["k", "crossover"], [[str(args.k), fmt(root, args.digits)]])
    return EXIT_OK


COMMANDS = {
    "bound": cmd_bound,
    "constants": cmd_constants,
    "poly": cmd_poly,
    "table1": cmd_table1,
    "curve": cmd_curve,
    "verify": cmd_verify,
    "crossover": cmd_crossover,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        stderr, sys.stderr = sys.stderr, err
        try:
            args = parser.parse_args(argv)
        finally:
            sys.stderr = stderr
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except (DomainError, ValueError) as exc:
        err.write(f"mills-bounds {args.command}: {exc}\n")
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
