"""Command-line interface tests: exit codes, formats, config round-trips."""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from restraint_games.cli import main
from restraint_games.sweep import CSV_HEADER

GRID_CONFIG = {
    "mechanism": {"mechanism": "tying-hands", "variant": "base"},
    "axes": [
        {"symbol": "V_D", "min": 0.5, "max": 2.0, "steps": 4},
        {"symbol": "m", "min": 0.5, "max": 2.0, "steps": 4},
    ],
    "fixed": {"c": 0.5, "V_B": 2.0, "r": 0.0, "p": 0.0, "prior": 0.5},
}


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_json_report(self, capsys):
        code, out, err = run(
            "classify --mechanism tying-hands --variant base "
            "--c 0.5 --vd 1 --vb 2 --m 2 --format json".split(),
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["pooling_on_restraint"]["holds"] is True
        assert report["separating"]["holds"] is False

    def test_validation_error_names_constraint(self, capsys):
        code, out, err = run(
            "classify --mechanism tying-hands --c 0.5 --vd 1 --vb 0.4 --m 2".split(),
            capsys,
        )
        assert code == 1
        assert out == ""
        assert err.startswith("error: validation:")
        assert "V_B > c" in err
        assert len(err.strip().splitlines()) == 1

    def test_missing_flag_is_validation_error(self, capsys):
        code, _, err = run("classify --c 0.5 --vd 1 --vb 2 --m 2".split(), capsys)
        assert code == 1 and "--mechanism required" in err

    def test_csv_format(self, capsys):
        code, out, _ = run(
            "classify --mechanism reducible --variant risk "
            "--c 0.5 --vd 1 --vb 2 --r 0.6 --m 2 --format csv".split(),
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1].split(",")[9] == "Both"

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code, out, _ = run(
            f"classify --mechanism sunk --c 0.5 --vd 1 --vb 2 --m 2 -o {target}".split(),
            capsys,
        )
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["pooling_on_restraint"]["holds"] is False


class TestSweep:
    def test_sweep_example(self, tmp_path, capsys):
        config = tmp_path / "grid.json"
        config.write_text(json.dumps(GRID_CONFIG))
        out_csv = tmp_path / "regions.csv"
        code, _, _ = run(
            f"sweep --config {config} --oracle-fraction 0.05 --seed 42 -o {out_csv}".split(),
            capsys,
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 17  # header + 4*4 points

    def test_sweep_json_format(self, tmp_path, capsys):
        config = tmp_path / "grid.json"
        config.write_text(json.dumps(GRID_CONFIG))
        code, out, _ = run(
            f"sweep --config {config} --oracle-fraction 0 --format json".split(), capsys
        )
        assert code == 0
        rows = json.loads(out)
        assert len(rows) == 16 and list(rows[0].keys()) == CSV_HEADER

    def test_discrepancy_exit_code(self, tmp_path, capsys):
        # risk-variant pooling diverges from the closed form at r > c
        config = tmp_path / "grid.json"
        config.write_text(
            json.dumps(
                {
                    "mechanism": {"mechanism": "tying-hands", "variant": "risk"},
                    "axes": [{"symbol": "m", "min": 1.1, "max": 1.4, "steps": 2}],
                    "fixed": {"c": 0.5, "V_D": 1.0, "V_B": 2.0, "r": 0.8, "p": 0.0, "prior": 0.5},
                }
            )
        )
        code, out, err = run(
            f"sweep --config {config} --oracle-fraction 1.0 --seed 1".split(), capsys
        )
        assert code == 2
        assert err.startswith("error: discrepancy:")
        assert len(err.strip().splitlines()) == 1

    def test_sweep_requires_grid(self, capsys):
        code, _, err = run("sweep --oracle-fraction 0".split(), capsys)
        assert code == 1 and "grid" in err

    def test_jobs_do_not_change_output(self, tmp_path, capsys):
        config = tmp_path / "grid.json"
        config.write_text(json.dumps(GRID_CONFIG))
        base = f"sweep --config {config} --oracle-fraction 0 --seed 0".split()
        code1, out1, _ = run(base, capsys)
        code2, out2, _ = run(base + ["--jobs", "2"], capsys)
        assert (code1, code2) == (0, 0) and out1 == out2

    def test_sweep_dump_config_round_trip(self, tmp_path, capsys):
        config = tmp_path / "grid.json"
        config.write_text(json.dumps(GRID_CONFIG))
        dump1, dump2 = tmp_path / "run1.json", tmp_path / "run2.json"
        code, _, _ = run(
            f"sweep --config {config} --oracle-fraction 0.1 --seed 9 "
            f"--dump-config {dump1}".split(),
            capsys,
        )
        assert code == 0
        code, _, _ = run(
            ["sweep", "--config", str(dump1), "--dump-config", str(dump2)], capsys
        )
        assert code == 0
        assert json.loads(dump1.read_text()) == json.loads(dump2.read_text())


class TestOracle:
    def test_json_certificates(self, capsys):
        code, out, _ = run(
            "oracle --mechanism tying-hands --variant risk "
            "--c 0.5 --vd 1 --vb 2 --r 0.6 --messages 0,1.5".split(),
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["counts"].get("Separating", 0) >= 1
        sep = [c for c in payload["certificates"] if c["class"] == "Separating"]
        assert sep[0]["profile"]["signal_of"] == {"restrained": 1.5, "aggressive": 0.0}

    def test_size_guard_exit_code(self, capsys):
        messages = ",".join(str(float(i)) for i in range(9))
        code, _, err = run(
            f"oracle --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --messages {messages}".split(),
            capsys,
        )
        assert code == 3
        assert err.startswith("error: size-guard:")

    def test_bad_messages(self, capsys):
        code, _, err = run(
            "oracle --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --messages 1,2".split(),
            capsys,
        )
        assert code == 1 and "messages contain 0" in err

    def test_csv_format(self, capsys):
        code, out, _ = run(
            "oracle --mechanism tying-hands --c 0.5 --vd 1 --vb 2 "
            "--messages 0,2 --format csv".split(),
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("class,signal_restrained")
        assert any("PoolingOnRestraint" in line for line in lines[1:])


class TestSimulate:
    def test_defaults_to_pooling_profile(self, capsys):
        code, out, _ = run(
            "simulate --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --m 2 "
            "--p 0.2 --trials 20000 --seed 3".split(),
            capsys,
        )
        assert code == 0
        result = json.loads(out)
        assert sum(result["outcome_counts"].values()) == 20000
        assert result["outcome_counts"]["conflict"] == 0

    def test_degenerate_prior_flag(self, capsys):
        argv = (
            "simulate --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --m 2 "
            "--p 0.2 --prior 1 --trials 50000 --seed 3"
        ).split()
        code, _, err = run(argv, capsys)
        assert code == 1 and "prior" in err
        code, out, _ = run(argv + ["--allow-degenerate-prior"], capsys)
        assert code == 0
        assert json.loads(out)["mean_u_B"] == pytest.approx(-0.4, abs=0.03)

    def test_dump_trials(self, tmp_path, capsys):
        log = tmp_path / "trials.csv"
        code, _, _ = run(
            f"simulate --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --m 2 "
            f"--trials 100 --seed 3 --dump-trials {log}".split(),
            capsys,
        )
        assert code == 0
        lines = log.read_text().splitlines()
        assert lines[0] == "trial,theta_initial,theta_final,message,fought,outcome,u_A,u_B"
        assert len(lines) == 101

    def test_csv_summary(self, capsys):
        code, out, _ = run(
            "simulate --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --m 2 "
            "--trials 1000 --seed 3 --format csv".split(),
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("conflict,exploit,restraint,mean_u_A")
        assert len(lines) == 2


class TestConfigHandling:
    def test_dump_config_round_trip(self, tmp_path, capsys):
        dump1 = tmp_path / "run1.json"
        dump2 = tmp_path / "run2.json"
        base = (
            "classify --mechanism tying-hands --variant risk "
            "--c 0.5 --vd 1 --vb 2 --r 0.7 --m 2 --format json"
        ).split()
        code, _, _ = run(base + ["--dump-config", str(dump1)], capsys)
        assert code == 0
        code, _, _ = run(
            ["classify", "--config", str(dump1), "--dump-config", str(dump2)], capsys
        )
        assert code == 0
        assert json.loads(dump1.read_text()) == json.loads(dump2.read_text())
        # and the reloaded run produces the same report as the flag run
        code, out_flags, _ = run(base, capsys)
        code2, out_config, _ = run(["classify", "--config", str(dump1)], capsys)
        assert (code, code2) == (0, 0) and out_flags == out_config

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        run(
            (
                "classify --mechanism tying-hands --c 0.5 --vd 1 --vb 2 --m 0.5 "
                f"--dump-config {cfg}"
            ).split(),
            capsys,
        )
        code, out, _ = run(["classify", "--config", str(cfg), "--m", "2"], capsys)
        assert code == 0
        assert json.loads(out)["pooling_on_restraint"]["holds"] is True

    def test_config_command_mismatch(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        run(
            f"classify --mechanism sunk --c 0.5 --vd 1 --vb 2 --m 1 --dump-config {cfg}".split(),
            capsys,
        )
        code, _, err = run(["oracle", "--config", str(cfg)], capsys)
        assert code == 1 and "config command" in err

    def test_unknown_flag_exits_one(self, capsys):
        code, _, err = run(["classify", "--nonsense"], capsys)
        assert code == 1 and err.startswith("error: validation:")


class TestProcessContract:
    def test_stdout_purity_and_logging(self, tmp_path):
        # subprocess so the env-var logging setup is exercised cleanly
        env = dict(os.environ, RESTRAINT_GAMES_LOG="info")
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "restraint_games.cli",
                "classify",
                "--mechanism",
                "tying-hands",
                "--c",
                "0.5",
                "--vd",
                "1",
                "--vb",
                "2",
                "--m",
                "2",
            ],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0
        json.loads(proc.stdout)  # stdout carries only the result
        assert "classify" in proc.stderr  # the info log went to stderr
