import csv
import json
import subprocess
import sys

import pytest

from uavloc.cli import build_parser, main


def test_simulate_writes_outputs(tmp_path, capsys):
    assert main(["simulate", "--seed", "3", "--revolutions", "2", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 3 and len(summary["revolutions"]) == 2
    assert (tmp_path / "controller_trace.csv").exists() and (tmp_path / "tracks.csv").exists()
    assert "rev   1" in capsys.readouterr().out


def test_simulate_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--seed", "42", "--revolutions", "3", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[episode]\nrevolutions = 4\nseed = 1\n\n[trajectory]\nrho = 120\n")
    assert main(["simulate", "--config", str(cfg), "--revolutions", "2", "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert len(summary["revolutions"]) == 2 and summary["seed"] == 1
    assert summary["revolutions"][0]["rho"] == 120.0


def test_bad_config_exits_with_error(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[episode]\nestimator = nope\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["simulate", "--estimator", "cnn", "--out", str(tmp_path)]) == 2


def test_dataset_and_training_pipeline(tmp_path):
    assert main(["generate-dataset", "--n-samples", "12", "--n-spots", "8", "--meas-per-spot", "4",
                 "--out", str(tmp_path)]) == 0
    data = str(tmp_path / "dataset.npz")
    assert main(["train-cnn", "--dataset", data, "--max-epochs", "2", "--out", str(tmp_path)]) == 0
    assert main(["train-lstm", "--dataset", data, "--max-epochs", "2", "--hidden", "8", "--out", str(tmp_path)]) == 0
    for name in ("cnn.npz", "cnn.meta.txt", "cnn_curve.csv", "lstm.npz", "lstm_curve.csv"):
        assert (tmp_path / name).exists()
    assert main(["simulate", "--estimator", "cnn", "--cnn-model", str(tmp_path / "cnn.npz"),
                 "--predictor", "lstm", "--lstm-model", str(tmp_path / "lstm.npz"), "--revolutions", "2",
                 "--config", str(_small_config(tmp_path)), "--out", str(tmp_path / "sim")]) == 0


def _small_config(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text("[episode]\nn_spots = 8\nmeas_per_spot = 4\n")
    return path


def test_evaluate_writes_csv(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[episode]\nn_spots = 10\nmeas_per_spot = 3\nrevolutions = 2\n")
    assert main(["evaluate", "--config", str(cfg), "--episodes", "1", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "evaluation.csv")))
    assert {r["family"] for r in rows} == {"waypoints", "rubble", "speed", "altitude", "static_loop"}


def test_range_demo(tmp_path):
    assert main(["range-demo", "--trials", "3", "--k", "1", "4", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "range_demo.csv")))
    assert rows[0] == ["true_delay", "estimated_delay", "K", "snr_db"]
    assert len(rows) == 1 + 3 * 2


def test_protocol_demo(capsys):
    assert main(["protocol-demo"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 7 and lines[0].startswith("UAV->UE SIB")


def test_unknown_subcommand_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["fly"])


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "uavloc.cli", "protocol-demo"], capture_output=True, text=True)
    assert res.returncode == 0 and "IDENTITY_RESPONSE" in res.stdout
