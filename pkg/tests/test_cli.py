import json
import sys

import pandas as pd
import pytest

import app


@pytest.fixture(autouse=True)
def _quiet_logging(monkeypatch):
    # the root logger belongs to pytest during tests
    monkeypatch.setattr(app, "setup_logging", lambda logs_dir: (None, None))
    monkeypatch.setattr(sys, "excepthook", sys.excepthook)


def run_cli(capsys, *argv):
    code = app.main(list(argv) + ["--log-dir", ""])
    captured = capsys.readouterr()
    report = json.loads(captured.out) if captured.out.strip() else None
    return code, report, captured.err


def test_spectral_identity_passes(capsys):
    code, report, _ = run_cli(capsys, "spectral", "--check", "thm8", "--gen", "star:3", "--q", "7")
    assert code == 0
    assert report["command"] == "spectral thm8"
    assert report["passed"]
    assert report["schema"] == "spectral-colorings/1"


def test_check_on_triangle_is_refused(capsys):
    code, report, err = run_cli(capsys, "verify", "--check", "lemma18", "--gen", "cycle:3", "--q", "7")
    assert code == 2
    assert report is None
    assert "hypothesis violated: triangle-free" in err


def test_check_outside_region_is_refused(capsys):
    code, _, err = run_cli(capsys, "verify", "--check", "thm9", "--gen", "star:3", "--q", "7", "--epsilon", "0.5")
    assert code == 2
    assert "hypothesis violated: parameter-region" in err


def test_check_inside_region_passes(capsys):
    code, report, _ = run_cli(capsys, "verify", "--check", "lemma18", "--gen", "star:3", "--q", "7",
                              "--epsilon", "0.1")
    assert code == 0
    assert report["result"]["delta"] == 3
    assert report["summary"].startswith("PASS")


def test_malformed_instance_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, report, err = run_cli(capsys, "oracle", "count", "--input", str(bad))
    assert code == 2
    assert report is None
    assert "error: Malformed JSON" in err


def test_missing_instance(capsys):
    code, _, err = run_cli(capsys, "oracle", "count")
    assert code == 2
    assert "--input FILE or --gen SPEC" in err


@pytest.mark.parametrize("argv", [["verify", "--check", "thm8"], ["oracle", "histogram"], ["frobnicate"]])
def test_argument_errors(argv, capsys):
    assert app.main(argv) == 2


def test_identical_runs_render_identically(capsys):
    argv = ("verify", "--check", "lemma14", "--gen", "path:4", "--q", "5", "--budget", "50",
            "--seed", "3", "--no-timestamp", "--threads", "1")
    first = (app.main(list(argv) + ["--log-dir", ""]), capsys.readouterr().out)
    second = (app.main(list(argv) + ["--log-dir", ""]), capsys.readouterr().out)
    assert first == second
    assert "timestamp" not in json.loads(first[1])


def test_generated_instance_round_trips(tmp_path, capsys):
    saved = tmp_path / "grid.json"
    code, report, _ = run_cli(capsys, "gen", "--gen", "grid:2x2", "--q", "6", "--out", str(saved))
    assert code == 0 and report is None
    code, report, _ = run_cli(capsys, "oracle", "count", "--input", str(saved))
    assert code == 0
    # a 4-cycle with 6 colors
    assert report["result"]["total"] == 5 ** 4 + 5


def test_marginals_csv(tmp_path, capsys):
    table = tmp_path / "marginals.csv"
    code, report, _ = run_cli(capsys, "oracle", "marginals", "--gen", "star:2", "--q", "4", "--csv", str(table))
    assert code == 0
    frame = pd.read_csv(table)
    assert len(frame) == 3 * 4
    assert list(frame.columns) == ["v", "color", "probability", "exact"]
    assert frame.loc[0, "exact"] == "1/4"


def test_bound_without_instance(capsys):
    code, report, _ = run_cli(capsys, "bound", "--n", "100", "--delta", "3", "--q", "7", "--epsilon", "0.1")
    assert code == 0
    assert report["result"]["bound"]["k0"] > 0
    assert report["result"]["bound"]["bound"] is None
    code, _, _ = run_cli(capsys, "bound", "--n", "100", "--q", "7")
    assert code == 2


def test_unmixed_chains_fail_the_tv_check(capsys):
    code, report, _ = run_cli(capsys, "tv", "--gen", "path:3", "--q", "4", "--steps", "0", "--chains", "20")
    assert code == 1
    assert not report["passed"]


def test_coupling_report(capsys):
    code, report, _ = run_cli(capsys, "couple", "--gen", "path:4", "--q", "5", "--max-steps", "100000")
    assert code == 0
    assert report["result"]["coupling"]["coalesced"]


def test_sample_trace_table(tmp_path, capsys):
    table = tmp_path / "trace.csv"
    code, report, _ = run_cli(capsys, "sample", "--gen", "cycle:4", "--q", "5", "--steps", "200",
                              "--stride", "50", "--csv", str(table))
    assert code == 0
    frame = pd.read_csv(table)
    assert list(frame["t"]) == [0, 50, 100, 150, 200]


def test_spectral_identity_on_saved_instance(tmp_path, capsys):
    saved = tmp_path / "lists.json"
    code, _, _ = run_cli(capsys, "gen", "--gen", "random_triangle_free:n=5,max_degree=3,edges=5", "--q", "5",
                         "--random-lists", "--delta", "3", "--seed", "2", "--out", str(saved))
    assert code == 0
    code, report, _ = run_cli(capsys, "spectral", "--check", "thm8", "--input", str(saved))
    assert code == 0
    assert report["result"]["report"]["check"] == "thm8"
    assert report["result"]["report"]["identity_residual"] <= 1e-8


def test_spectral_gap_check(capsys):
    code, report, _ = run_cli(capsys, "spectral", "--check", "gap", "--gen", "path:3", "--q", "4")
    assert code == 0
    assert report["result"]["report"]["details"]["states"] == 36


def test_tv_on_non_ergodic_instance_is_refused(capsys):
    code, report, err = run_cli(capsys, "tv", "--gen", "cycle:3", "--q", "3", "--steps", "10", "--chains", "5")
    assert code == 2
    assert report is None
    assert "degree + 2" in err
