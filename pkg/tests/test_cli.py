import csv
import json
import os

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner

from apsel.cli import main
from apsel.dataset import save_fingerprint
from apsel.schemas import load_schema
from apsel.synthetic import generate_synthetic


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    """Small synthetic corpus shared by the CLI tests (n=8, f=8, m=320)."""
    path = tmp_path_factory.mktemp("data") / "fp.csv"
    d = generate_synthetic(m=320, n_informative=3, n_redundant=3, n_noise=2, seed=0)
    save_fingerprint(d, str(path))
    return str(path)


def run_cli(args, **kwargs):
    result = CliRunner().invoke(main, args, catch_exceptions=False, **kwargs)
    return result


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def assert_rfc4180(path, expected_header):
    raw = open(path, "rb").read()
    assert b"\r\n" in raw, "emitted CSV should use CRLF line endings"
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == expected_header
    assert all(len(r) == len(rows[0]) for r in rows)
    return rows


class TestGenSynthetic:
    def test_writes_csv_and_summary(self, tmp_path):
        out = str(tmp_path / "run")
        result = run_cli(
            ["--seed", "1", "--out", out, "gen-synthetic", "--m", "200",
             "--informative", "2", "--redundant", "1", "--noise", "1"]
        )
        assert result.exit_code == 0
        assert os.path.isfile(os.path.join(out, "synthetic.csv"))
        summary = json.loads(result.stdout)
        jsonschema.validate(summary, load_schema("dataset_summary"))
        assert summary["n"] == 4 and summary["f"] == 4


class TestStats:
    def test_artifacts_and_schema(self, data_csv, tmp_path):
        out = str(tmp_path / "stats")
        result = run_cli(["--out", out, "stats", "--data", data_csv])
        assert result.exit_code == 0
        summary = read_json(os.path.join(out, "stats_summary.json"))
        jsonschema.validate(summary, load_schema("stats_summary"))
        jsonschema.validate(
            read_json(os.path.join(out, "dataset_summary.json")),
            load_schema("dataset_summary"),
        )
        rows = assert_rfc4180(os.path.join(out, "importance.csv"), ["ap_id", "importance"])
        assert len(rows) == 1 + 8
        red = assert_rfc4180(
            os.path.join(out, "redundancy.csv"), [f"WAP{i + 1:03d}" for i in range(8)]
        )
        matrix = np.array([[float(v) for v in r] for r in red[1:]])
        assert matrix.shape == (8, 8)
        assert np.array_equal(matrix, matrix.T)
        for figure in ("importance.png", "redundancy.png"):
            assert os.path.getsize(os.path.join(out, figure)) > 0

    def test_no_plots_flag(self, data_csv, tmp_path):
        out = str(tmp_path / "stats")
        run_cli(["--out", out, "stats", "--data", data_csv, "--no-plots"])
        assert not os.path.exists(os.path.join(out, "importance.png"))

    def test_missing_data_is_exit_3(self, tmp_path):
        result = run_cli(["--out", str(tmp_path), "stats", "--data", str(tmp_path / "no.csv")])
        assert result.exit_code == 3

    def test_no_dataset_is_exit_2(self, tmp_path):
        result = run_cli(["--out", str(tmp_path), "stats"])
        assert result.exit_code == 2


class TestSolve:
    def test_selection_schema_and_export(self, data_csv, tmp_path):
        out = str(tmp_path / "solve")
        result = run_cli(
            ["--seed", "0", "--out", out, "solve", "--data", data_csv,
             "--alpha", "0.5", "--solver", "exhaustive", "--export-qubo"]
        )
        assert result.exit_code == 0
        payload = read_json(os.path.join(out, "selection.json"))
        jsonschema.validate(payload, load_schema("selection"))
        assert payload["k"] == len(payload["x"])
        assert set(payload["x"]) <= {f"WAP{i + 1:03d}" for i in range(8)}
        dense = np.loadtxt(os.path.join(out, "qubo_dense.csv"), delimiter=",")
        assert dense.shape == (8, 8)
        triplets = open(os.path.join(out, "qubo_triplets.txt")).read().splitlines()
        assert all(len(line.split()) == 3 for line in triplets)

    def test_bad_alpha_is_exit_2(self, data_csv, tmp_path):
        result = run_cli(
            ["--out", str(tmp_path), "solve", "--data", data_csv, "--alpha", "1.7"]
        )
        assert result.exit_code == 2

    def test_sa_matches_exhaustive_here(self, data_csv, tmp_path):
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        run_cli(["--seed", "0", "--out", out_a, "solve", "--data", data_csv,
                 "--alpha", "0.45", "--solver", "sa"])
        run_cli(["--seed", "0", "--out", out_b, "solve", "--data", data_csv,
                 "--alpha", "0.45", "--solver", "exhaustive"])
        sa = read_json(os.path.join(out_a, "selection.json"))
        ex = read_json(os.path.join(out_b, "selection.json"))
        assert sa["energy"] == pytest.approx(ex["energy"], abs=1e-9)


class TestAuto:
    def test_full_pipeline_artifacts(self, data_csv, tmp_path):
        out = str(tmp_path / "auto")
        result = run_cli(
            ["--seed", "0", "--out", out, "auto", "--data", data_csv,
             "--solver", "exhaustive"]
        )
        assert result.exit_code == 0
        report = read_json(os.path.join(out, "report.json"))
        jsonschema.validate(report, load_schema("report"))
        jsonschema.validate(
            read_json(os.path.join(out, "selection.json")), load_schema("selection")
        )
        assert_rfc4180(os.path.join(out, "trace.csv"), ["iteration", "alpha", "k", "accuracy"])
        for figure in ("importance.png", "redundancy.png", "trace.png"):
            assert os.path.getsize(os.path.join(out, figure)) > 0
        timings = report["timings"]
        for stage in ("load", "split", "stats", "search", "evaluate", "write", "total"):
            assert f"{stage}_s" in timings
        assert report["search"]["result"]["k"] == report["selection"]["k"]

    def test_decision_outputs_deterministic(self, data_csv, tmp_path):
        reports = []
        for tag in ("r1", "r2"):
            out = str(tmp_path / tag)
            run_cli(["--seed", "7", "--out", out, "auto", "--data", data_csv,
                     "--solver", "sa", "--sa-sweeps", "200", "--sa-restarts", "4"])
            report = read_json(os.path.join(out, "report.json"))
            report.pop("timings")
            reports.append(json.dumps(report, sort_keys=True))
            sel = read_json(os.path.join(out, "selection.json"))
            sel.pop("wall_time_ms")
            reports.append(json.dumps(sel, sort_keys=True))
        assert reports[0] == reports[2]
        assert reports[1] == reports[3]

    def test_config_file_with_flag_override(self, data_csv, tmp_path):
        config = {
            "data": {"path": data_csv},
            "solver": "exhaustive",
            "seed": 3,
            "out": str(tmp_path / "from-config"),
            "search": {"max_iterations": 2},
        }
        config_path = str(tmp_path / "run.json")
        with open(config_path, "w") as fh:
            json.dump(config, fh)
        result = run_cli(["--config", config_path, "auto"])
        assert result.exit_code == 0
        report = read_json(os.path.join(config["out"], "report.json"))
        assert report["config"]["seed"] == 3
        assert len(report["search"]["iterations"]) <= 2

        # a flag must beat the config value
        out2 = str(tmp_path / "override")
        result = run_cli(["--config", config_path, "--out", out2, "auto",
                          "--max-iterations", "1"])
        assert result.exit_code == 0
        report2 = read_json(os.path.join(out2, "report.json"))
        assert len(report2["search"]["iterations"]) == 1

    def test_bad_config_json_is_exit_2(self, tmp_path):
        bad = str(tmp_path / "bad.json")
        with open(bad, "w") as fh:
            fh.write("{not json")
        result = run_cli(["--config", bad, "auto"])
        assert result.exit_code == 2

    def test_paper_faithful_mode_single_iteration_with_huge_epsilon(self, data_csv, tmp_path):
        out = str(tmp_path / "faithful")
        result = run_cli(
            ["--seed", "0", "--out", out, "--mode", "paper-faithful", "auto",
             "--data", data_csv, "--solver", "exhaustive", "--epsilon", "1.0"]
        )
        assert result.exit_code == 0
        report = read_json(os.path.join(out, "report.json"))
        assert len(report["search"]["iterations"]) == 1
        assert report["search"]["iterations"][0]["alpha"] == 0.5


class TestSweep:
    def test_grid_artifacts(self, data_csv, tmp_path):
        out = str(tmp_path / "sweep")
        result = run_cli(
            ["--seed", "0", "--out", out, "sweep", "--data", data_csv,
             "--solver", "exhaustive", "--grid", "0,0.5,1"]
        )
        assert result.exit_code == 0
        trace = read_json(os.path.join(out, "trace.json"))
        jsonschema.validate(trace, load_schema("trace"))
        assert [it["alpha"] for it in trace["iterations"]] == [0.0, 0.5, 1.0]
        assert trace["iterations"][-1]["k"] == 8
        assert os.path.getsize(os.path.join(out, "sweep.png")) > 0

    def test_grid_points_option(self, data_csv, tmp_path):
        out = str(tmp_path / "sweep")
        result = run_cli(
            ["--seed", "0", "--out", out, "sweep", "--data", data_csv,
             "--solver", "exhaustive", "--grid-points", "5", "--no-plots"]
        )
        assert result.exit_code == 0
        trace = read_json(os.path.join(out, "trace.json"))
        assert len(trace["iterations"]) == 5


class TestEvaluate:
    def test_full_set_report(self, data_csv, tmp_path):
        out = str(tmp_path / "eval")
        result = run_cli(["--seed", "0", "--out", out, "evaluate", "--data", data_csv])
        assert result.exit_code == 0
        payload = read_json(os.path.join(out, "accuracy.json"))
        jsonschema.validate(payload, load_schema("accuracy"))
        assert payload["n_aps_used"] == 8

    def test_selection_file_restricts_columns(self, data_csv, tmp_path):
        selection = {"x": ["WAP001", "WAP002", "WAP003"]}
        sel_path = str(tmp_path / "selection.json")
        with open(sel_path, "w") as fh:
            json.dump(selection, fh)
        out = str(tmp_path / "eval")
        result = run_cli(
            ["--seed", "0", "--out", out, "evaluate", "--data", data_csv,
             "--selection", sel_path]
        )
        assert result.exit_code == 0
        payload = read_json(os.path.join(out, "accuracy.json"))
        assert payload["n_aps_used"] == 3

    def test_unknown_ap_id_is_exit_2(self, data_csv, tmp_path):
        sel_path = str(tmp_path / "selection.json")
        with open(sel_path, "w") as fh:
            json.dump({"x": ["NOPE"]}, fh)
        result = run_cli(
            ["--out", str(tmp_path / "o"), "evaluate", "--data", data_csv,
             "--selection", sel_path]
        )
        assert result.exit_code == 2

    def test_forest_classifier_path(self, data_csv, tmp_path):
        out = str(tmp_path / "eval")
        result = run_cli(
            ["--seed", "0", "--out", out, "evaluate", "--data", data_csv,
             "--classifier", "forest", "--forest-trees", "10"]
        )
        assert result.exit_code == 0
        assert read_json(os.path.join(out, "accuracy.json"))["accuracy"] > 0.5


class TestBench:
    def test_rows_and_agreement(self, data_csv, tmp_path):
        out = str(tmp_path / "bench")
        result = run_cli(
            ["--seed", "0", "--out", out, "bench", "--data", data_csv,
             "--solvers", "sa,exhaustive", "--sa-sweeps", "300", "--sa-restarts", "5"]
        )
        assert result.exit_code == 0
        payload = read_json(os.path.join(out, "bench.json"))
        jsonschema.validate(payload, load_schema("bench"))
        rows = {r["solver"]: r for r in payload["rows"]}
        assert set(rows) == {"sa", "exhaustive"}
        assert all(r["wall_time_s"] > 0 for r in payload["rows"])
        assert rows["sa"]["k"] == rows["exhaustive"]["k"]
        assert_rfc4180(
            os.path.join(out, "bench.csv"),
            ["solver", "wall_time_s", "k", "alpha", "iterations", "accuracy"],
        )
        assert os.path.getsize(os.path.join(out, "bench.png")) > 0

    def test_unknown_solver_is_exit_4(self, data_csv, tmp_path):
        result = run_cli(
            ["--out", str(tmp_path / "b"), "bench", "--data", data_csv,
             "--solvers", "sa,quantum"]
        )
        assert result.exit_code == 4


class TestGlobalFlags:
    def test_threads_flag_smoke(self, data_csv, tmp_path):
        out = str(tmp_path / "t")
        result = run_cli(
            ["--seed", "0", "--threads", "1", "--out", out, "stats", "--data", data_csv]
        )
        assert result.exit_code == 0

    def test_rss_range_flag(self, tmp_path):
        path = str(tmp_path / "fp.csv")
        with open(path, "w") as fh:
            fh.write("WAP1,WAP2,FLOOR\n-10,3,0\n-5,4,1\n-3,2,0\n-7,1,1\n")
        out = str(tmp_path / "o")
        result = run_cli(
            ["--out", out, "stats", "--data", path, "--rss-range", "-20,5",
             "--sentinel", "999"]
        )
        assert result.exit_code == 0
        summary = read_json(os.path.join(out, "dataset_summary.json"))
        assert summary["rss_min"] == -20.0 and summary["rss_max"] == 5.0
