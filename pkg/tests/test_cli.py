import json
import subprocess
import sys

import pytest
import yaml

from chunkselect.cli import main

HAND_TRACE_CSV = "4,1,1\n0.0\n0.1\n0.2\n5.0\n"

SCENARIO = {
    "name": "cli-test",
    "dimension": 2,
    "rounds": 2,
    "modes": [
        {"center": [0.0, 0.0], "spread": 0.05, "weight": 0.8, "success": True},
        {"center": [8.0, 0.0], "spread": 0.05, "weight": 0.2, "success": False},
    ],
    "policies": {
        "single": {"type": "single"},
        "consensus": {"type": "consensus", "samples": 8, "seed": 1},
    },
}


@pytest.fixture
def batch_file(tmp_path):
    path = tmp_path / "batch.txt"
    path.write_text(HAND_TRACE_CSV)
    return path


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(SCENARIO))
    return path


class TestSelectCommand:
    def test_select_prints_diagnostics(self, batch_file, capsys):
        code = main(["select", "--input", str(batch_file), "--tau", "0.3", "--seed", "7"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["selected_index"] == 1
        assert doc["selected_chunk"] == [[0.1]]
        assert doc["diagnostics"]["unimodal"] is False

    def test_select_to_output_file(self, batch_file, tmp_path):
        out = tmp_path / "result.json"
        code = main(["select", "--input", str(batch_file), "--output", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["selected_index"] == 1

    def test_missing_input_is_a_data_error(self, tmp_path, capsys):
        code = main(["select", "--input", str(tmp_path / "missing.txt")])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_malformed_input_is_a_data_error(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("2,1,1\n0.5\n")
        assert main(["select", "--input", str(path)]) == 2

    def test_usage_error_exits_one(self, capsys):
        assert main(["select"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand_exits_one(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_k_override(self, batch_file, capsys):
        code = main(["select", "--input", str(batch_file), "--k-override", "3"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["selected_index"] == 1
        code = main(["select", "--input", str(batch_file), "--k-override", "9"])
        assert code == 2

    def test_metric_flag(self, batch_file, capsys):
        code = main(["select", "--input", str(batch_file), "--metric", "cosine"])
        assert code == 0
        json.loads(capsys.readouterr().out)


class TestSimulateCommand:
    def test_emits_table(self, scenario_file, capsys):
        code = main(
            ["simulate", "--scenario", str(scenario_file), "--episodes", "50",
             "--repeats", "2", "--seed", "3", "--policy", "consensus"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "config_id,metric,K,C,tau,mean,std"
        cells = lines[1].split(",")
        assert cells[0] == "consensus"
        assert 0.0 <= float(cells[5]) <= 1.0

    def test_single_policy_row(self, scenario_file, capsys):
        code = main(
            ["simulate", "--scenario", str(scenario_file), "--episodes", "30",
             "--repeats", "2", "--policy", "single"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1].split(",")[2] == "1"

    def test_unknown_policy_is_a_data_error(self, scenario_file):
        assert main(["simulate", "--scenario", str(scenario_file), "--policy", "nope"]) == 2

    def test_missing_scenario_is_a_data_error(self, tmp_path):
        assert main(["simulate", "--scenario", str(tmp_path / "absent.yaml")]) == 2


class TestSweepCommand:
    def test_k_axis_rows(self, scenario_file, capsys):
        code = main(
            ["sweep", "--scenario", str(scenario_file), "--k-values", "1,4",
             "--episodes", "40", "--repeats", "2", "--seed", "5"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "config_id,metric,K,C,tau,mean,std"
        assert [l.split(",")[0] for l in lines[1:]] == ["K=1", "K=4"]

    def test_sweep_to_file(self, scenario_file, tmp_path):
        out = tmp_path / "table.csv"
        code = main(
            ["sweep", "--scenario", str(scenario_file), "--metrics", "euclidean,cosine",
             "--episodes", "30", "--repeats", "2", "--output", str(out)]
        )
        assert code == 0
        assert len(out.read_text().strip().splitlines()) == 3

    def test_bad_metric_rejected(self, scenario_file):
        assert main(["sweep", "--scenario", str(scenario_file), "--metrics", "hamming"]) == 2


class TestBenchCommand:
    def test_reports_percentiles(self, capsys):
        code = main(["bench", "--k-list", "4", "--dim-list", "16", "--iterations", "10"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "K,D,iterations,p50_us,p99_us,mean_us"
        cells = lines[1].split(",")
        assert cells[:3] == ["4", "16", "10"]
        assert float(cells[3]) <= float(cells[4])


class TestServeStdioEndToEnd:
    def test_subprocess_round_trip(self):
        request = json.dumps(
            {"id": "cli-1", "candidates": [[[0.0]], [[0.1]], [[0.2]], [[5.0]]]}
        )
        proc = subprocess.run(
            [sys.executable, "-m", "chunkselect", "serve", "--transport", "stdio"],
            input=request + "\ngarbage\n" + request.replace("cli-1", "cli-2") + "\n",
            capture_output=True,
            text=True,
            timeout=60,
        )
        assert proc.returncode == 0
        responses = [json.loads(line) for line in proc.stdout.splitlines()]
        assert [r.get("id") for r in responses] == ["cli-1", None, "cli-2"]
        assert responses[0]["selected_index"] == 1
        assert responses[1]["error"]["code"] == "parse_error"
