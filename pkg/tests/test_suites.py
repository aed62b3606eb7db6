import pytest

from mills_bounds import suites


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv(suites.THREADS_ENV, "3")
    assert suites.worker_count() == 3
    monkeypatch.setenv(suites.THREADS_ENV, "0")
    assert suites.worker_count() == 1
    monkeypatch.setenv(suites.THREADS_ENV, "many")
    with pytest.raises(ValueError):
        suites.worker_count()
    monkeypatch.delenv(suites.THREADS_ENV)
    assert suites.worker_count() >= 1


def test_serial_and_parallel_runs_agree():
    cfg = suites.SuiteConfig(k_max=3, points=50)
    names = ["pq-coefficients", "exact-at-zero", "bracketing", "oracle-shape"]
    serial = suites.run_suites(cfg, names, workers=1)
    parallel = suites.run_suites(cfg, names, workers=2)
    assert [(r.name, r.ok, r.detail) for r in serial] == [(r.name, r.ok, r.detail) for r in parallel]
    assert all(r.ok for r in serial)


def test_crashing_suite_is_reported(monkeypatch):
    def boom(cfg):
        raise RuntimeError("kaput")

    monkeypatch.setitem(suites.SUITES, "boom", boom)
    (result,) = suites.run_suites(suites.SuiteConfig(), ["boom"], workers=1)
    assert not result.ok and "kaput" in result.detail
    assert result.line().startswith("[FAIL]")


@pytest.mark.parametrize("name", ["relations", "sign-patterns", "chains", "constants", "oracle-dual", "oracle-derivative"])
def test_small_suites_pass(name):
    (result,) = suites.run_suites(suites.SuiteConfig(k_max=4, points=80), [name], workers=1)
    assert result.ok, result.detail


@pytest.mark.slow
def test_max_error_consistency_suite():
    (result,) = suites.run_suites(suites.SuiteConfig(), ["max-error-consistency"], workers=1)
    assert result.ok, result.detail
