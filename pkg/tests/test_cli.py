import json
import subprocess
import sys

import pytest

from roadqueue.cli import main

SECTION_1 = {"L": 100.0, "v_f": 28.0, "w": 14.0, "rho_j": 0.18, "c": 18}


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


class TestSolveSection:
    def test_json_payload(self, capsys):
        code, out, err = run_cli(
            capsys, "solve-section", "--lambda", "0.5", "--section", "1"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["lambda"] == 0.5
        assert doc["model"] == "triangular"
        assert doc["convention"] == "shifted"
        assert len(doc["distribution"]) == 19
        assert sum(doc["distribution"]) == pytest.approx(1.0, abs=1e-12)
        assert doc["expected_travel_time"] == pytest.approx(
            doc["expected_count"] / doc["throughput"]
        )

    def test_linear_model_override(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve-section", "--lambda", "0.8", "--model", "linear"
        )
        assert code == 0
        assert json.loads(out)["model"] == "linear"

    def test_singular_model_exits_3(self, capsys):
        code, out, err = run_cli(
            capsys,
            "solve-section",
            "--lambda",
            "0.5",
            "--convention",
            "exact",
        )
        assert code == 3
        assert out == ""
        assert "error" in err

    def test_usage_error_exits_2(self, capsys):
        code, out, _ = run_cli(capsys, "solve-section", "--lambda", "0.5",
                               "--section", "5")
        assert code == 2
        assert out == ""

    def test_missing_config_exits_4(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys,
            "solve-section",
            "--lambda",
            "0.5",
            "--config",
            str(tmp_path / "missing.json"),
        )
        assert code == 4
        assert out == ""

    def test_argparse_errors_exit_2(self, capsys):
        code, _, _ = run_cli(capsys, "solve-section")
        assert code == 2
        code, _, _ = run_cli(capsys, "no-such-command")
        assert code == 2


class TestSolveTandem:
    def test_json_payload(self, capsys):
        code, out, _ = run_cli(capsys, "solve-tandem", "--lambda", "0.8")
        assert code == 0
        doc = json.loads(out)
        assert doc["theta"] == pytest.approx(
            doc["lambda"] * (1 - doc["blocking"]), abs=1e-9
        )
        assert doc["residual"] <= 1e-10
        assert doc["iterations"] <= 200
        assert len(doc["marginal"]) == 19
        assert len(doc["downstream"]) == 19
        assert doc["tv_vs_exact_2d"] > 0
        assert doc["root_brackets"] is None

    def test_scan_roots(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve-tandem", "--lambda", "0.8", "--scan-roots"
        )
        assert code == 0
        doc = json.loads(out)
        theta = doc["theta"]
        assert any(lo <= theta <= hi for lo, hi in doc["root_brackets"])

    def test_one_section_config_exits_2(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        path.write_text(json.dumps(SECTION_1))
        code, out, _ = run_cli(
            capsys, "solve-tandem", "--lambda", "0.8", "--config", str(path)
        )
        assert code == 2
        assert out == ""

    def test_unreachable_tolerance_exits_3(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "solve-tandem",
            "--lambda",
            "0.8",
            "--tol",
            "1e-18",
            "--max-iter",
            "5",
        )
        assert code == 3
        assert out == ""


class TestDistributions:
    def test_tandem_marginal_speed_csv(self, capsys):
        code, out, _ = run_cli(capsys, "distributions", "--lambda", "0.8")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["value", "probability"]
        assert len(rows) == 13
        total = sum(float(row[1]) for row in rows)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_travel_time_kind(self, capsys):
        code, out, _ = run_cli(
            capsys, "distributions", "--lambda", "0.8", "--kind", "travel-time"
        )
        assert code == 0
        _, rows = parse_csv(out)
        values = [float(row[0]) for row in rows]
        assert values[0] == pytest.approx(100.0 / 28.0, rel=1e-9)

    def test_single_section_flag(self, capsys):
        code, out, _ = run_cli(
            capsys, "distributions", "--lambda", "0.8", "--section", "2"
        )
        assert code == 0
        _, rows = parse_csv(out)
        # section 2 free speed: atoms top out at 14
        assert max(float(row[0]) for row in rows) == pytest.approx(14.0)

    def test_grid_mode_linear(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "distributions",
            "--lambda",
            "0.8",
            "--model",
            "linear",
            "--mode",
            "paper-grid",
            "--section",
            "1",
        )
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 28
        assert sum(float(row[1]) for row in rows) < 1.0

    def test_grid_mode_triangular_exits_2(self, capsys):
        code, out, _ = run_cli(
            capsys, "distributions", "--lambda", "0.8", "--mode", "paper-grid"
        )
        assert code == 2
        assert out == ""


class TestSweep:
    def test_tandem_sweep_schema(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sweep",
            "--lambda-from",
            "0.1",
            "--lambda-to",
            "2.0",
            "--steps",
            "5",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == [
            "lambda",
            "theta",
            "blocking",
            "expected_count",
            "travel_time",
            "tv_vs_exact_2d",
        ]
        assert len(rows) == 5
        assert float(rows[0][0]) == pytest.approx(0.1)
        assert float(rows[-1][0]) == pytest.approx(2.0)

    def test_section_sweep_schema(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sweep",
            "--lambda-from",
            "0.1",
            "--lambda-to",
            "1.0",
            "--steps",
            "4",
            "--section",
            "1",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == [
            "lambda",
            "blocking",
            "throughput",
            "expected_count",
            "travel_time",
        ]
        assert len(rows) == 4

    def test_bad_grid_exits_2(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sweep",
            "--lambda-from",
            "1.0",
            "--lambda-to",
            "0.5",
            "--steps",
            "4",
        )
        assert code == 2
        assert out == ""


class TestSimulate:
    def test_payload_and_reproducibility(self, capsys):
        args = (
            "simulate",
            "--lambda",
            "0.8",
            "--events",
            "10000",
            "--seed",
            "7",
        )
        code, out_a, _ = run_cli(capsys, *args)
        assert code == 0
        code, out_b, _ = run_cli(capsys, *args)
        assert code == 0
        assert out_a == out_b
        doc = json.loads(out_a)
        assert doc["seed"] == 7
        assert doc["events"] == 10000
        assert doc["algorithm"] == "numpy-pcg64"
        assert not doc["absorbed"]
        assert doc["tv_vs_analytical"] > 0

    def test_absorbing_run_reports_null_tv(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "simulate",
            "--lambda",
            "2.0",
            "--events",
            "10000",
            "--convention",
            "exact",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["absorbed"] is True
        assert doc["tv_vs_analytical"] is None
        assert doc["empirical"][-1] == 1.0


class TestCompare:
    def test_three_way_agreement(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--lambda", "0.8", "--events", "100000"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["tv_analytical_vs_exact"] < 1e-12
        assert doc["tv_empirical_vs_analytical"] < 0.05


class TestFitExponential:
    def test_explicit_free_speed(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "fit-exponential",
            "--fit-a",
            "20",
            "--fit-va",
            "48",
            "--fit-b",
            "140",
            "--fit-vb",
            "20",
            "--fit-vf",
            "55",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["beta"] == pytest.approx(137.41831534831252, rel=1e-12)
        assert doc["gamma"] == pytest.approx(1.0078532179620698, rel=1e-12)

    def test_free_speed_defaults_to_config(self, capsys):
        # bundled section 1 has v_f = 28
        code, out, _ = run_cli(
            capsys,
            "fit-exponential",
            "--fit-a",
            "5",
            "--fit-va",
            "20",
            "--fit-b",
            "15",
            "--fit-vb",
            "8",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["beta"] > 0
        assert doc["gamma"] > 0

    def test_bad_anchors_exit_2(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "fit-exponential",
            "--fit-a",
            "20",
            "--fit-va",
            "48",
            "--fit-b",
            "140",
            "--fit-vb",
            "50",
            "--fit-vf",
            "55",
        )
        assert code == 2
        assert out == ""


class TestFigureData:
    def test_fig4_occupancy_comparison(self, capsys):
        code, out, _ = run_cli(capsys, "figure-data", "--figure", "fig4")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["lambda", "n", "ours", "jain_smith"]
        assert len(rows) == 3 * 19
        lams = {float(row[0]) for row in rows}
        assert lams == {0.5, 1.0, 1.5}

    @pytest.mark.parametrize("figure", ["fig5", "fig6", "fig7"])
    def test_sweep_figures(self, capsys, figure):
        code, out, _ = run_cli(capsys, "figure-data", "--figure", figure)
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["lambda", "ours", "jain_smith"]
        assert len(rows) == 40

    def test_fig5_blocking_panel(self, capsys):
        code, out, _ = run_cli(
            capsys, "figure-data", "--figure", "fig5", "--metric", "blocking"
        )
        assert code == 0
        _, rows = parse_csv(out)
        assert all(0 <= float(row[1]) <= 1 for row in rows)

    def test_fig8_grid_histogram(self, capsys):
        code, out, _ = run_cli(capsys, "figure-data", "--figure", "fig8")
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 28

    @pytest.mark.parametrize("figure", ["fig9", "fig10"])
    def test_tandem_pushforward_figures(self, capsys, figure):
        code, out, _ = run_cli(
            capsys, "figure-data", "--figure", figure, "--kind", "travel-time"
        )
        assert code == 0
        _, rows = parse_csv(out)
        total = sum(float(row[1]) for row in rows)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_kind_misuse_exits_2(self, capsys):
        code, out, _ = run_cli(
            capsys, "figure-data", "--figure", "fig4", "--kind", "speed"
        )
        assert code == 2
        assert out == ""

    def test_metric_misuse_exits_2(self, capsys):
        code, out, _ = run_cli(
            capsys, "figure-data", "--figure", "fig6", "--metric", "count"
        )
        assert code == 2
        assert out == ""


class TestOutputHandling:
    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "law.json"
        code, out, _ = run_cli(
            capsys,
            "solve-section",
            "--lambda",
            "0.5",
            "--output",
            str(path),
        )
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["lambda"] == 0.5

    def test_unwritable_output_exits_4(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys,
            "solve-section",
            "--lambda",
            "0.5",
            "--output",
            str(tmp_path / "no" / "dir" / "law.json"),
        )
        assert code == 4

    def test_stdin_config(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(SECTION_1)))
        code, out, _ = run_cli(
            capsys, "solve-section", "--lambda", "0.5", "--config", "-"
        )
        assert code == 0
        assert json.loads(out)["lambda"] == 0.5

    def test_csv_numbers_carry_12_significant_digits(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sweep",
            "--lambda-from",
            "0.1",
            "--lambda-to",
            "2.0",
            "--steps",
            "3",
            "--section",
            "1",
        )
        assert code == 0
        _, rows = parse_csv(out)
        cell = rows[0][1]  # blocking at lambda = 0.1, far from round
        mantissa = cell.replace(".", "").replace("-", "").lstrip("0")
        mantissa = mantissa.split("e")[0]
        assert len(mantissa) == 12


def test_console_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "roadqueue.cli", "solve-section", "--lambda", "0.5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["lambda"] == 0.5
