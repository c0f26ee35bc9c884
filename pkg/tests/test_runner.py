import json

import pandas as pd
import pytest

import onofri_lab.core.runner as runner
import onofri_lab.ui.menu as menu
from onofri_lab.__main__ import launch
from onofri_lab.analysis.bubbles import bubble_report
from onofri_lab.core.runner import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from onofri_lab.solvers.continuation import BRANCH_COLUMNS


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("ONOFRI_LAB_THREADS", "ONOFRI_LAB_ASCII_LOGS", "ONOFRI_LAB_DEBUG"):
        monkeypatch.delenv(name, raising=False)
    return tmp_path


def run(*argv):
    return main(["onofri", *argv])


def test_quad_check_exit_codes(workdir):
    out = workdir / "quad.csv"
    assert run("quad-check", "--L", "32", "--out", str(out)) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 35
    assert frame["passed"].all()
    assert run("quad-check", "--L", "2", "--out", str(workdir / "low.csv")) == EXIT_FAILED
    assert run("quad-check", "--L", "0") == EXIT_USAGE


def test_config_search_exit_codes(workdir):
    assert run("config-search", "--N", "1") == EXIT_USAGE
    assert run("config-search", "--N", "3", "--even") == EXIT_USAGE
    out = workdir / "pair.json"
    assert run("config-search", "--N", "2", "--out", str(out)) == EXIT_OK
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["infimum"] == pytest.approx(2.0 / 3.0)
    assert len(record["atoms"]) == 2


def test_config_search_several_n_gives_list(workdir):
    out = workdir / "many.json"
    assert run("config-search", "--N", "2,4", "--even", "--starts", "5", "--out", str(out)) == EXIT_OK
    records = json.loads(out.read_text(encoding="utf-8"))
    assert [r["N"] for r in records] == [2, 4]


def test_usage_errors():
    assert run("minimize", "--c0", "0.7") == EXIT_USAGE
    assert run("branch", "--a-end", "1.0") == EXIT_USAGE
    assert run("quad-check", "--profile", "no-such-profile") == EXIT_USAGE
    assert run("quad-check", "--config", "absent.yaml") == EXIT_USAGE
    assert run("no-such-command") == EXIT_USAGE
    assert run() == EXIT_USAGE


def test_list_profiles():
    assert run("--list-profiles") == EXIT_OK


def test_bubble_report_small_run(workdir):
    out = workdir / "bubbles.csv"
    code = run(
        "bubble-report", "--configs", "PAIR", "--eps", "1e-2",
        "--L", "16", "--n-r", "60", "--n-ang", "8", "--out", str(out),
    )
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 1
    assert frame.loc[0, "config"] == "PAIR"


def test_mto_sample_with_dump(workdir):
    out = workdir / "sample.json"
    dump = workdir / "worst.csv"
    code = run(
        "mto-sample", "--count", "5", "--lmax", "3", "--L", "16",
        "--dump-worst", str(dump), "--out", str(out),
    )
    assert code == EXIT_OK
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["passed"] is True
    assert record["dump"] == str(dump)
    assert dump.exists()


def test_repeated_runs_are_byte_identical(workdir):
    first, second = workdir / "a.json", workdir / "b.json"
    argv = ("config-search", "--N", "3", "--starts", "5", "--seed", "4", "--threads", "2")
    assert run(*argv, "--out", str(first)) == EXIT_OK
    assert run(*argv, "--out", str(second)) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_stdout_output(capsys):
    assert run("quad-check", "--L", "8", "--max-degree", "1") == EXIT_OK
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "a,b,c,degree,exact,computed,abs_error,passed"
    assert len(lines) == 5


def test_bubble_report_row_errors_do_not_fail(workdir):
    out = workdir / "cube.csv"
    assert run("bubble-report", "--configs", "CUBE", "--eps", "1e-2", "--L", "16", "--out", str(out)) == EXIT_OK
    frame = pd.read_csv(out)
    assert frame.loc[0, "config"] == "CUBE"
    assert isinstance(frame.loc[0, "error"], str) and frame.loc[0, "error"]


def test_branch_success(workdir):
    out = workdir / "branch.csv"
    code = run(
        "branch", "--a-start", "0.34", "--a-end", "0.36", "--step", "0.01",
        "--lmax", "64", "--out", str(out),
    )
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == BRANCH_COLUMNS
    assert len(frame) >= 1
    assert frame["a"].is_monotonic_increasing


def test_trivial_branch_rows(workdir):
    out = workdir / "trivial.csv"
    code = run(
        "branch", "--no-switch", "--a-start", "0.34", "--a-end", "0.40", "--step", "0.02",
        "--lmax", "32", "--out", str(out),
    )
    assert code == EXIT_OK
    assert len(pd.read_csv(out)) == 4


def test_minimize_seed_records(workdir):
    out = workdir / "min.json"
    assert run("minimize", "--seeds", "2", "--out", str(out)) == EXIT_OK
    records = json.loads(out.read_text(encoding="utf-8"))
    assert len(records) == 2
    for record in records:
        assert {"J", "feasible", "converged"} <= set(record)
        assert record["converged"] is True
        assert abs(record["J"]) < 1e-6


def test_minimize_without_iterations_fails(workdir):
    out = workdir / "stuck.json"
    assert run("minimize", "--seeds", "1", "--max-iter", "0", "--out", str(out)) == EXIT_FAILED
    records = json.loads(out.read_text(encoding="utf-8"))
    assert records[0]["converged"] is False


def test_mto_sample_with_lower_bound(workdir):
    out = workdir / "lemma.json"
    code = run(
        "mto-sample", "--count", "5", "--lmax", "3", "--L", "16",
        "--lemma", "--lemma-count", "200", "--out", str(out),
    )
    assert code == EXIT_OK
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["lower_bound"]["accepted"] > 0
    assert record["lower_bound"]["empirical_C0"] > 0


def test_bubble_report_fails_on_wrong_asymptotics(workdir, monkeypatch):
    def skewed(*args, **kwargs):
        frame = bubble_report(*args, **kwargs)
        frame["mass_ratio"] = 1.5
        return frame

    monkeypatch.setattr(runner, "bubble_report", skewed)
    out = workdir / "skewed.csv"
    code = run(
        "bubble-report", "--configs", "PAIR", "--eps", "1e-2",
        "--L", "16", "--n-r", "60", "--n-ang", "8", "--out", str(out),
    )
    assert code == EXIT_FAILED
    assert out.exists()


def test_launch_dispatches_to_cli_and_menu(monkeypatch):
    assert launch(["onofri", "quad-check", "--L", "8", "--max-degree", "1"]) == EXIT_OK
    assert launch(["onofri", "quad-check", "--L", "0"]) == EXIT_USAGE
    calls = []
    monkeypatch.setattr(menu, "run", lambda: calls.append("menu"))
    assert launch(["onofri"]) == EXIT_OK
    assert calls == ["menu"]
