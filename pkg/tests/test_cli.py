import json

import numpy as np
import pytest

from asymloss.cli import main
from tests.conftest import ROSTER_SCHEMA, synthetic_roster_rows, write_roster_csv


def run_cli(*args) -> int:
    try:
        code = main([str(a) for a in args])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    return code


@pytest.fixture
def toy_csv(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "toy.csv"
    lines = ["y,x1,x2"]
    for _ in range(60):
        x1, x2 = (float(v) for v in rng.normal(size=2))
        y = 1 if x1 + 0.5 * x2 + 0.3 * rng.normal() > 0 else -1
        lines.append(f"{y},{x1!r},{x2!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def symmetric_spec(tmp_path):
    path = tmp_path / "symmetric.json"
    path.write_text('{"type": "symmetric"}')
    return path


class TestFit:
    def test_fit_writes_outputs(self, tmp_path, toy_csv, symmetric_spec):
        out = tmp_path / "run1"
        code = run_cli("fit", "--data", toy_csv, "--loss", symmetric_spec,
                       "--model", "logit", "--convexifier", "logistic",
                       "--out-dir", out)
        assert code == 0
        assert (out / "model.json").exists()
        assert (out / "metrics.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["subcommand"] == "fit"
        assert str(toy_csv) in manifest["inputs"]

    def test_missing_data_flag_exits_2(self, symmetric_spec):
        assert run_cli("fit", "--loss", symmetric_spec, "--model", "logit") == 2

    def test_unknown_model_exits_2(self, toy_csv, symmetric_spec, tmp_path):
        assert run_cli("fit", "--data", toy_csv, "--loss", symmetric_spec,
                       "--model", "forest", "--out-dir", tmp_path / "x") == 2

    def test_assumption_violation_exits_4(self, tmp_path, toy_csv):
        bad = tmp_path / "bad.json"
        bad.write_text('{"type": "constant", "l_pp": 2, "l_np": 1, "l_pn": 1, "l_nn": 0}')
        assert run_cli("fit", "--data", toy_csv, "--loss", bad,
                       "--model", "logit", "--out-dir", tmp_path / "y") == 4


class TestPredictEvaluate:
    def test_predict_then_evaluate_reproduces_fit_metrics(self, tmp_path, toy_csv, symmetric_spec):
        out = tmp_path / "run"
        assert run_cli("fit", "--data", toy_csv, "--loss", symmetric_spec,
                       "--model", "logit", "--out-dir", out) == 0
        pred = tmp_path / "predictions.csv"
        assert run_cli("predict", "--model", out / "model.json", "--data", toy_csv,
                       "--loss", symmetric_spec, "--out", pred) == 0
        header = pred.read_text().splitlines()[0]
        assert header == "row_id,soft_score,decision,threshold_c,weight_omega"
        metrics2 = tmp_path / "metrics2.json"
        assert run_cli("evaluate", "--model", out / "model.json", "--data", toy_csv,
                       "--loss", symmetric_spec, "--out", metrics2) == 0
        assert json.loads(metrics2.read_text()) == json.loads((out / "metrics.json").read_text())

    def test_dictionary_mismatch_exits_3(self, tmp_path, toy_csv, symmetric_spec):
        out = tmp_path / "run"
        run_cli("fit", "--data", toy_csv, "--loss", symmetric_spec,
                "--model", "logit", "--out-dir", out)
        other = tmp_path / "other.csv"
        other.write_text("y,x1\n1,0.5\n-1,-0.5\n")
        assert run_cli("predict", "--model", out / "model.json", "--data", other,
                       "--loss", symmetric_spec, "--out", tmp_path / "p.csv") == 3

    def test_empty_data_exits_3(self, tmp_path, symmetric_spec):
        empty = tmp_path / "empty.csv"
        empty.write_text("y,x1\n")
        assert run_cli("weights", "--data", empty, "--loss", symmetric_spec,
                       "--out", tmp_path / "w.csv") == 3


class TestWeights:
    def test_weights_csv(self, tmp_path, toy_csv, symmetric_spec):
        out = tmp_path / "weights.csv"
        assert run_cli("weights", "--data", toy_csv, "--loss", symmetric_spec,
                       "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "row_id,weight_omega,threshold_c"
        assert lines[1] == "0,2.0,0.5"


class TestSimulate:
    def test_same_seed_byte_identical(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"n": 200}))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run_cli("simulate", "--config", cfg, "--reps", 2, "--seed", 7,
                           "--out-dir", out) == 0
        assert (out1 / "replications.csv").read_bytes() == (out2 / "replications.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
        summary = json.loads((out1 / "summary.json").read_text())
        assert set(summary) == {"p_ratio_gt_1", "mean", "min", "q1", "median", "q3", "max"}

    def test_sweep_output_columns(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"n": 100, "replications": 1, "sigma": 1.0,
                                   "psi0": 1.0, "phi0": 1.0, "psi1": 1.0, "phi1": 1.0}))
        out = tmp_path / "sweep"
        assert run_cli("simulate", "--config", cfg, "--seed", 1, "--out-dir", out,
                       "--sweep", "phi0:1.0:1.5:0.5") == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "param,value,fp0,fp1,fn0,fn1"
        assert len(lines) == 3

    def test_bad_sweep_spec_exits_2(self, tmp_path):
        assert run_cli("simulate", "--sweep", "phi0:bad", "--out-dir", tmp_path) == 2

    def test_unknown_config_field_exits_2(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text('{"nn": 100}')
        assert run_cli("simulate", "--config", cfg, "--out-dir", tmp_path / "o") == 2


class TestPretrialCommand:
    def test_comparison_table(self, tmp_path):
        roster = tmp_path / "roster.csv"
        write_roster_csv(roster, synthetic_roster_rows(n=120, seed=4))
        schema = tmp_path / "schema.json"
        schema.write_text(json.dumps(ROSTER_SCHEMA))
        out = tmp_path / "emp"
        assert run_cli("pretrial", "--data", roster, "--schema", schema,
                       "--families", "logit", "--out-dir", out) == 0
        lines = (out / "comparison.csv").read_text().splitlines()
        assert lines[0] == "row,linear:unweighted,linear:weighted"
        assert len(lines) == 14  # header + the 13 table rows

    def test_two_families_make_four_columns(self, tmp_path):
        roster = tmp_path / "roster.csv"
        write_roster_csv(roster, synthetic_roster_rows(n=120, seed=5))
        schema = tmp_path / "schema.json"
        schema.write_text(json.dumps(ROSTER_SCHEMA))
        out = tmp_path / "emp2"
        assert run_cli("pretrial", "--data", roster, "--schema", schema,
                       "--families", "logit,boosting", "--epochs", 2,
                       "--out-dir", out) == 0
        header = (out / "comparison.csv").read_text().splitlines()[0]
        assert header.count(":") == 4

    def test_missing_schema_column_exits_3(self, tmp_path):
        roster = tmp_path / "roster.csv"
        rows = synthetic_roster_rows(n=10, seed=6)
        for r in rows:
            del r["crime"]
        write_roster_csv(roster, rows)
        schema = tmp_path / "schema.json"
        schema.write_text(json.dumps(ROSTER_SCHEMA))
        assert run_cli("pretrial", "--data", roster, "--schema", schema,
                       "--out-dir", tmp_path / "e") == 3


class TestSelfcheckAndManifest:
    def test_selfcheck_passes(self, capsys):
        assert run_cli("selfcheck") == 0
        assert "match" in capsys.readouterr().out

    def test_rerun_reproduces_outputs(self, tmp_path, toy_csv, symmetric_spec):
        out1, out2 = tmp_path / "m1", tmp_path / "m2"
        for out in (out1, out2):
            assert run_cli("fit", "--data", toy_csv, "--loss", symmetric_spec,
                           "--model", "logit", "--seed", 3, "--out-dir", out) == 0
        assert (out1 / "model.json").read_bytes() == (out2 / "model.json").read_bytes()
        assert (out1 / "metrics.json").read_bytes() == (out2 / "metrics.json").read_bytes()
        m1 = json.loads((out1 / "manifest.json").read_text())
        assert m1["seed"] == 3
        assert m1["tool_version"]
