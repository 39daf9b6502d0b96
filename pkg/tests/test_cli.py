"""Tests for the command-line interface."""

import json
import math

import numpy as np
import pytest

from grassvol import volume_ratio_center
from grassvol.cli import main
from grassvol.matrixio import write_matrix_csv, write_matrix_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCenterCommand:
    def test_volume_mode(self, capsys):
        code, out, _ = run(capsys, "center", "--mode", "volume", "--m", "500", "--d", "10")
        assert code == 0
        assert float(out) == volume_ratio_center(500, 10)
        assert float(out) < 0.0

    def test_sine_mode(self, capsys):
        code, out, _ = run(capsys, "center", "--mode", "sine", "--m", "500", "--k", "10")
        assert code == 0 and float(out) < 0.0

    def test_shape_violation_exits_two(self, capsys):
        code, _, err = run(capsys, "center", "--mode", "volume", "--m", "10", "--d", "10")
        assert code == 2 and "error" in err

    def test_missing_required_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["center", "--m", "10"])
        assert exc.value.code == 2

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "center", "--mode", "volume", "--m", "100",
                           "--d", "5", "--format", "json")
        assert code == 0
        assert json.loads(out)["value"] == volume_ratio_center(100, 5)


class TestBoundCommand:
    def test_davies_value(self, capsys):
        code, out, _ = run(capsys, "bound", "--formula", "davies", "--L", "2",
                           "--k", "1", "--delta", "0.5", "--t", "0", "--c", "1")
        assert code == 0
        assert float(out) == pytest.approx(18.257392765871345, rel=1e-12)

    def test_default_constants_warn(self, capsys):
        code, out, err = run(capsys, "bound", "--formula", "theorem1", "--L", "100",
                             "--k", "8", "--d", "4", "--eps", "0.5", "--t", "3")
        assert code == 0
        assert "non-normative" in err
        assert float(out) > 0

    def test_explicit_constants_do_not_warn(self, capsys):
        code, _, err = run(capsys, "bound", "--formula", "theorem1", "--L", "100",
                           "--k", "8", "--d", "4", "--eps", "0.5", "--t", "3",
                           "--C", "1", "--C-prime", "1")
        assert code == 0 and err == ""

    def test_corollary1_from_l(self, capsys):
        code, out, _ = run(capsys, "bound", "--formula", "corollary1", "--L", "100",
                           "--k", "8", "--eps", "0.5", "--t", "3",
                           "--C", "1", "--C-prime", "1")
        assert code == 0
        assert float(out) == pytest.approx(4176750.500059300, rel=1e-12)

    def test_davies_delta_out_of_range_exits_two(self, capsys):
        code, _, err = run(capsys, "bound", "--formula", "davies", "--L", "2",
                           "--k", "1", "--delta", "1.5", "--t", "0")
        assert code == 2 and "delta" in err


class TestGeometryCommand:
    def test_volume_of_identity_columns(self, capsys, tmp_path):
        p = tmp_path / "m.csv"
        write_matrix_csv(p, np.eye(4)[:, :2])
        code, out, _ = run(capsys, "geometry", "--op", "volume", str(p))
        assert code == 0 and float(out) == 0.0

    def test_right_angle_lines(self, capsys, tmp_path):
        px, py = tmp_path / "x.csv", tmp_path / "y.csv"
        write_matrix_csv(px, np.eye(3)[:, :1])
        write_matrix_csv(py, np.eye(3)[:, 1:2])
        code, out, _ = run(capsys, "geometry", "--op", "angles", str(px), str(py))
        assert code == 0
        assert out.strip() == "1.5707963267948966"

    def test_json_matrix_input(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        write_matrix_json(p, np.eye(5)[:, :3])
        code, out, _ = run(capsys, "geometry", "--op", "volume", str(p))
        assert code == 0 and float(out) == 0.0

    def test_json_output_format(self, capsys, tmp_path):
        px, py = tmp_path / "x.csv", tmp_path / "y.csv"
        write_matrix_csv(px, np.eye(3)[:, :1])
        write_matrix_csv(py, np.eye(3)[:, 1:2])
        code, out, _ = run(capsys, "geometry", "--op", "angles", str(px), str(py),
                           "--format", "json")
        assert code == 0
        assert json.loads(out)["angles"] == [math.pi / 2]

    def test_sines_of_overlapping_spans_exit_three(self, capsys, tmp_path):
        px, py = tmp_path / "x.csv", tmp_path / "y.csv"
        write_matrix_csv(px, np.eye(4)[:, :2])
        write_matrix_csv(py, np.eye(4)[:, 1:3])
        code, _, err = run(capsys, "geometry", "--op", "sines", str(px), str(py))
        assert code == 3 and "error" in err

    def test_parse_failure_exits_two(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2\n3\n")
        code, _, err = run(capsys, "geometry", "--op", "volume", str(p))
        assert code == 2 and "error" in err

    def test_missing_file_exits_two(self, capsys, tmp_path):
        code, _, _ = run(capsys, "geometry", "--op", "volume", str(tmp_path / "nope.csv"))
        assert code == 2

    def test_wrong_arity_exits_two(self, capsys, tmp_path):
        p = tmp_path / "m.csv"
        write_matrix_csv(p, np.eye(3)[:, :1])
        code, _, _ = run(capsys, "geometry", "--op", "angles", str(p))
        assert code == 2


class TestSimulateCommand:
    def test_repeat_runs_are_byte_identical(self, capsys, tmp_path):
        argv = ["simulate", "--experiment", "lemma1", "--n", "60", "--d", "4",
                "--m", "30", "--trials", "50", "--seed", "9"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b), "--threads", "4"]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()
        assert json.loads((tmp_path / "a.json").read_text()) == json.loads(
            (tmp_path / "b.json").read_text()
        )

    def test_prints_output_paths(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        code, stdout, _ = run(capsys, "simulate", "--experiment", "fig1",
                              "--m-grid", "500,600", "--d-grid", "10",
                              "--out", str(out))
        assert code == 0
        lines = stdout.splitlines()
        assert lines == [str(out), str(tmp_path / "r.json")]

    def test_summary_schema(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        run(capsys, "simulate", "--experiment", "lemma1", "--n", "60", "--d", "4",
            "--m", "30", "--trials", "40", "--seed", "3", "--out", str(out))
        summary = json.loads((tmp_path / "r.json").read_text())
        assert set(summary) == {"experiment", "config", "per_m_summary", "pass"}
        assert summary["experiment"] == "lemma1"
        assert summary["pass"] is True

    def test_csv_schema_matches_experiment(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        run(capsys, "simulate", "--experiment", "lemma1", "--n", "60", "--d", "4",
            "--m", "30", "--trials", "5", "--seed", "3", "--out", str(out))
        header = out.read_text().splitlines()[0]
        assert header == "m,trial,log_ratio,center,deviation"

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({
            "experiment": "lemma1", "n": 60, "d": 4, "m": [30], "trials": 25,
        }))
        out = tmp_path / "r.csv"
        code, _, _ = run(capsys, "simulate", "--config", str(config),
                         "--trials", "10", "--seed", "1", "--out", str(out))
        assert code == 0
        summary = json.loads((tmp_path / "r.json").read_text())
        assert summary["config"]["trials"] == 10
        assert summary["config"]["n"] == 60

    def test_preset_resolves_experiment(self, capsys, tmp_path):
        # presets carry long-running shapes; shrink everything for the test
        out = tmp_path / "r.csv"
        code, _, _ = run(capsys, "simulate", "--preset", "theorem2-large-m500-k10",
                         "--n", "60", "--k", "3", "--m", "30", "--trials", "5",
                         "--pairs-per-set", "1", "--seed", "2", "--out", str(out))
        assert code == 0
        summary = json.loads((tmp_path / "r.json").read_text())
        assert summary["experiment"] == "theorem2"
        assert summary["config"]["n"] == 60

    def test_plot_writes_figure(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        code, stdout, _ = run(capsys, "simulate", "--experiment", "perturbation",
                              "--n", "40", "--k", "6", "--d", "3",
                              "--trials", "10", "--seed", "5",
                              "--out", str(out), "--plot")
        assert code == 0
        fig = tmp_path / "r.png"
        assert str(fig) in stdout
        assert fig.stat().st_size > 0

    def test_missing_experiment_exits_two(self, capsys):
        code, _, err = run(capsys, "simulate", "--n", "60")
        assert code == 2 and "experiment" in err

    def test_invalid_config_shape_exits_two(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        code, _, _ = run(capsys, "simulate", "--experiment", "lemma1", "--n", "10",
                         "--d", "20", "--m", "30", "--trials", "5", "--out", str(out))
        assert code == 2

    def test_statistical_failure_exits_one(self, capsys, tmp_path, monkeypatch):
        import grassvol.cli as cli_mod

        real = cli_mod._run_simulation

        def failing(opts, seed, threads):
            result = real(opts, seed, threads)
            result.passed = False
            return result

        monkeypatch.setattr(cli_mod, "_run_simulation", failing)
        out = tmp_path / "r.csv"
        code, _, err = run(capsys, "simulate", "--experiment", "fig1",
                           "--m-grid", "500", "--d-grid", "10", "--out", str(out))
        assert code == 1
        assert "FAILED" in err
        assert out.exists()  # outputs still written for inspection


class TestValueFileOutput:
    def test_center_out_writes_file_and_prints_path(self, capsys, tmp_path):
        out = tmp_path / "v.txt"
        code, stdout, _ = run(capsys, "center", "--mode", "volume", "--m", "100",
                              "--d", "5", "--out", str(out))
        assert code == 0
        assert stdout.strip() == str(out)
        assert float(out.read_text()) == volume_ratio_center(100, 5)


class TestBoundDavisPairwise:
    def test_pairwise_flag(self, capsys):
        code, out, _ = run(capsys, "bound", "--formula", "davies", "--L", "100",
                           "--k", "8", "--delta", "0.5", "--t", "3", "--pairwise")
        assert code == 0
        want = 2.0 / 0.5 * (math.log(2 * 4950) + 8 * math.log(24.0) + 3.0)
        assert float(out) == pytest.approx(want, rel=1e-12)
