import csv
import io
import json
import os
import subprocess
import sys

import pytest

from mills_bounds.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_bound_text_and_side():
    code, out, _ = call("bound", "--family", "pollak", "--x", "1")
    assert code == 0 and "upper" in out
    code, out, _ = call("bound", "--family", "sqrt-star", "--k", "1", "--x", "1", "--side")
    assert code == 0 and out.strip() == "lower"


def test_bound_json_fields():
    code, out, _ = call("bound", "--family", "shenton-j2", "--k", "4", "--x", "2", "--format", "json", "--digits", "25")
    (row,) = json.loads(out)
    assert code == 0 and row["side"] == "lower"
    assert float(row["error"]) < 0
    assert len(row["upper_tail"].replace(".", "").lstrip("0")) == 25


@pytest.mark.parametrize(
    "argv",
    [
        ["bound", "--family", "pollak", "--x", "-1"],
        ["bound", "--family", "classic-cf", "--x", "0"],
        ["bound", "--family", "sqrt-star", "--k", "-2", "--x", "1"],
        ["bound", "--family", "sqrt-star", "--k", "5000", "--x", "1"],
        ["poly", "--k", "500"],
    ],
)
def test_domain_errors_exit_1(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == "" and err


def test_negative_x_message():
    _, _, err = call("bound", "--family", "pollak", "--x", "-1")
    assert "x >= 0" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["bound", "--family", "nope", "--x", "1"],
        ["bound", "--family", "pollak", "--x", "abc"],
        ["poly", "--k", "3", "--digits", "30"],
        ["poly", "--k", "3", "--digits", "5"],
        ["poly", "--k", "3", "--unknown-flag"],
        ["curve", "--low", "0", "--high", "1", "--points", "3"],
    ],
)
def test_usage_errors_exit_64(argv):
    code, _, err = call(*argv)
    assert code == 64 and "usage:" in err


def test_constants_csv():
    code, out, _ = call("constants", "--k-max", "3", "--csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    assert rows[0][:5] == ["k", "c_star", "delta", "x_star", "x_tilde"]
    assert rows[1][1] == "0.63661977236758134308"  # 2/pi at 20 digits


def test_poly_table():
    code, out, _ = call("poly", "--k", "8", "--table")
    assert code == 0
    assert "105" in out and "279" in out


def test_curve_csv_dialect():
    code, out, _ = call("curve", "--bounds", "sqrt-star:1,pollak", "--low", "0.5", "--high", "4", "--points", "5", "--log")
    assert code == 0
    assert out.endswith("\n") and "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "sqrt-star:1", "pollak"]
    assert len(rows) == 6 and all(len(r) == 3 for r in rows)
    assert all("E" not in cell for r in rows[1:] for cell in r)
    assert len(rows[1][1].lstrip("-").replace(".", "").split("e")[0].lstrip("0")) == 20


def test_curve_figure_preset():
    code, out, _ = call("curve", "--figure", "fig1", "--low", "0", "--high", "2", "--points", "3")
    assert code == 0 and out.splitlines()[0] == "x,komatu-lower,lb1,pollak,sampford"


def test_crossover():
    code, out, _ = call("crossover", "--k", "0")
    assert code == 0 and out.split()[-1].startswith("3.13444")


def test_table1_csv_shape():
    code, out, _ = call("table1", "--no-scan", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 9 and all(len(r) == 6 for r in rows)
    assert [r[0] for r in rows[1:]] == [str(k) for k in range(8)]
    assert code in (0, 2)  # 2 whenever any cell differs from the reference


def test_verify_subset_passes():
    code, out, _ = call("verify", "--suite", "pq-coefficients", "--suite", "excess-sandwich")
    assert code == 0 and out.count("[PASS]") == 2


def test_verify_reports_failure(monkeypatch):
    from mills_bounds import suites

    failing = lambda cfg: suites.SuiteResult("always fails", False, "forced")  # noqa: E731
    monkeypatch.setitem(suites.SUITES, "pq-coefficients", failing)
    code, out, _ = call("verify", "--suite", "pq-coefficients")
    assert code == 2 and "[FAIL]" in out


def test_output_is_deterministic():
    argv = ["curve", "--bounds", "exp-star:3", "--low", "0", "--high", "3", "--points", "7"]
    assert call(*argv) == call(*argv)


def test_module_entry_point():
    cmd = [sys.executable, "-m", "mills_bounds", "bound", "--family", "sampford", "--x", "1", "--format", "csv"]
    first = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, text=True, check=True, env={**os.environ, "MILLS_BOUNDS_THREADS": "1"}).stdout
    assert first == second and "1.5" in first
