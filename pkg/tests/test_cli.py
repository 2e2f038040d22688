"""End-to-end command-line behavior: flags, configs, files, exit codes."""

import hashlib
import json
import math

import pytest

from spinbath.cli import build_parser, main

from test_harness import TENSION_MODEL, TENSION_VERDICT, sha256


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def test_parser_requires_subcommand():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([])
    assert info.value.code == 2


def test_parser_rejects_unknown_flag():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["simulate", "--bogus"])
    assert info.value.code == 2


def test_predict_format_choices_exclude_csv():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["predict", "--format", "csv"])
    assert info.value.code == 2


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["simulate", "--n", "4", "--seed", "7",
                 "--t-end", "10", "--steps", "50", "--output", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "simulated 50 points" in stdout
    assert f"wrote {out}" in stdout
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "t,re_r,im_r,r_sq,expectation"
    assert len(lines) == 51


def test_simulate_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["simulate", "--n", "6", "--seed", "123", "--t-end", "25",
            "--steps", "200", "--phases", "uniform"]
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert sha256(a) == sha256(b)


def test_simulate_without_output_prints_summary(capsys):
    code = main(["simulate", "--n", "2", "--seed", "5",
                 "--t-end", "3", "--steps", "10"])
    assert code == 0
    assert "final |r|^2 =" in capsys.readouterr().out


def test_simulate_from_config_with_flag_override(tmp_path):
    out = tmp_path / "series.csv"
    config = write_json(tmp_path / "config.json", {
        "model": {"random": {"n": 3, "seed": 9}},
        "grid": {"t_end": 4.0, "steps": 6},
        "output": {"path": str(out), "format": "csv"},
    })
    assert main(["simulate", "--config", config, "--steps", "12"]) == 0
    assert len(out.read_text().strip().split("\n")) == 13


def test_simulate_equal_coupling_flag(tmp_path):
    out = tmp_path / "equal.csv"
    code = main(["simulate", "--n", "3", "--seed", "1",
                 "--equal-coupling", "0.5", "--t-end", "6.283",
                 "--steps", "5", "--output", str(out)])
    assert code == 0


def test_simulate_json_format(tmp_path):
    out = tmp_path / "series.json"
    assert main(["simulate", "--n", "2", "--seed", "3", "--t-end", "2",
                 "--steps", "4", "--output", str(out),
                 "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["times"]) == 4


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------

def test_predict_small_model(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["predict", "--n", "5", "--seed", "2", "--output", str(out)])
    assert code == 0
    assert "verdict: no_verdict" in capsys.readouterr().out
    payload = json.loads(out.read_text())
    assert payload["n_points"] == 32
    assert payload["verdict"] == "no_verdict"


def test_predict_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["predict", "--n", "12", "--seed", "44"]
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert sha256(a) == sha256(b)


def test_predict_threshold_flags(tmp_path, capsys):
    out = tmp_path / "loose.json"
    code = main(["predict", "--n", "16", "--seed", "105",
                 "--cv-max", "30", "--ks-max", "0.30",
                 "--eps-global", "5e-3", "--eps-group", "5e-3",
                 "--output", str(out)])
    assert code == 0
    assert "verdict: decoheres" in capsys.readouterr().out
    assert json.loads(out.read_text())["verdict"] == "decoheres"


def test_predict_equal_coupling_sets_degenerate_flag(tmp_path, capsys):
    out = tmp_path / "deg.json"
    code = main(["predict", "--n", "20", "--seed", "1",
                 "--equal-coupling", "0.25", "--output", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["has_degenerate_lines"] is True
    assert payload["n_points"] == 21
    assert abs(payload["recurrence_time"] - math.pi / 0.25) < 1e-9


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def test_compare_consistent_exit_zero(tmp_path, capsys):
    out = tmp_path / "cmp.json"
    config = write_json(tmp_path / "cfg.json", {
        "model": {"random": {"n": 16, "seed": 105}},
        "verdict": {"cv_max": 30.0, "ks_max": 0.30,
                    "eps_global": 5e-3, "eps_group": 5e-3},
        "output": {"path": str(out), "format": "json"},
    })
    code = main(["compare", "--config", config])
    assert code == 0
    assert "agreement: consistent" in capsys.readouterr().out
    assert json.loads(out.read_text())["agreement"]["status"] == "consistent"


def test_compare_tension_exit_one(tmp_path, capsys):
    config = write_json(tmp_path / "cfg.json", {
        "model": {"inline": TENSION_MODEL},
        "verdict": dict(TENSION_VERDICT),
    })
    code = main(["compare", "--config", config])
    assert code == 1
    stdout = capsys.readouterr().out
    assert "agreement: tension" in stdout
    assert "exceeds the consistency bound" in stdout


def test_compare_no_verdict_exit_zero(capsys):
    assert main(["compare", "--n", "3", "--seed", "4",
                 "--t-end", "20", "--steps", "100"]) == 0
    assert "verdict: no_verdict" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# oracle-check
# ---------------------------------------------------------------------------

def test_oracle_check_exit_zero(capsys):
    code = main(["oracle-check", "--n-max", "5", "--cases", "20", "--seed", "3"])
    assert code == 0
    assert "oracle check: 20 cases" in capsys.readouterr().out


def test_oracle_check_rejects_oversized_n(capsys):
    code = main(["oracle-check", "--n-max", "25", "--cases", "5", "--seed", "1"])
    assert code == 2
    assert "oracle cap" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_summary_and_csv(tmp_path, capsys):
    out = tmp_path / "lines.csv"
    code = main(["spectrum", "--n", "4", "--seed", "6",
                 "--equal-coupling", "0.5", "--output", str(out)])
    assert code == 0
    assert "5 lines over [-2, 2]" in capsys.readouterr().out
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "omega,weight,multiplicity"
    assert len(lines) == 6


def test_spectrum_model_file(tmp_path, capsys):
    model = write_json(tmp_path / "model.json", TENSION_MODEL)
    code = main(["spectrum", "--model-file", model])
    assert code == 0
    assert "64 lines" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Error handling and exit codes
# ---------------------------------------------------------------------------

def test_corrupted_model_file_exits_two_with_field_path(tmp_path, capsys):
    model = write_json(tmp_path / "model.json", {
        "a": [1.0, 0.0], "b": [0.0, 0.0],
        "spins": [{"alpha": [0.9, 0.0], "beta": [0.9, 0.0], "g": 1.0}],
    })
    code = main(["predict", "--model-file", model])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert "model.inline.spins[0]" in err


def test_missing_seed_exits_two(capsys):
    code = main(["simulate", "--n", "4", "--t-end", "1", "--steps", "4"])
    assert code == 2
    assert "--n and --seed" in capsys.readouterr().err


def test_model_file_conflicts_with_random_flags(tmp_path, capsys):
    model = write_json(tmp_path / "model.json", TENSION_MODEL)
    code = main(["predict", "--model-file", model, "--n", "4"])
    assert code == 2
    assert "conflicts" in capsys.readouterr().err


def test_equal_coupling_conflicts_with_g_max(capsys):
    code = main(["simulate", "--n", "4", "--seed", "1",
                 "--equal-coupling", "0.5", "--g-max", "2.0",
                 "--t-end", "1", "--steps", "4"])
    assert code == 2
    assert "conflicts" in capsys.readouterr().err


def test_unreadable_config_exits_two(tmp_path, capsys):
    code = main(["simulate", "--config", str(tmp_path / "absent.json")])
    assert code == 2
    assert "cannot read" in capsys.readouterr().err


def test_invalid_json_config_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["simulate", "--config", str(bad)])
    assert code == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_unwritable_output_exits_two(tmp_path, capsys):
    code = main(["simulate", "--n", "2", "--seed", "1", "--t-end", "1",
                 "--steps", "4",
                 "--output", str(tmp_path / "missing" / "out.csv")])
    assert code == 2
    assert "io error:" in capsys.readouterr().err


def test_cap_violation_exits_two(capsys):
    code = main(["predict", "--n", "30", "--seed", "1"])
    assert code == 2
    assert "error:" in capsys.readouterr().err
