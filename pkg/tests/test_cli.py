import json

import pytest
from click.testing import CliRunner

from fairaudit import __version__
from fairaudit.cli import main
from fairaudit.fixtures import fixture_path
from importlib import resources

CONTEXTS = resources.files("fairaudit").joinpath("data/contexts")
GRANT = ["--data", str(fixture_path("grant.csv")), "--label-col", "y", "--pred-col", "yhat", "--group-col", "group"]
BERKELEY = ["--data", str(fixture_path("berkeley.csv")), "--label-col", "y", "--pred-col", "yhat", "--group-col", "group"]


def run(*args, input=None):
    return CliRunner().invoke(main, list(args), input=input)


def by_id(payload):
    return {r["metric_id"]: r for r in payload["metric_results"]}


def test_version():
    res = run("--version")
    assert res.exit_code == 0 and __version__ in res.output


def test_audit_grant():
    res = run("audit", *GRANT, "--metrics", "EMO,PP")
    assert res.exit_code == 1, res.output
    out = json.loads(res.output)
    metrics = by_id(out)
    assert metrics["EMO"]["parity_gap"] == pytest.approx(0.515, abs=5e-4)
    assert not metrics["EMO"]["satisfied"]
    assert metrics["PP"]["parity_gap"] == 0 and metrics["PP"]["satisfied"]
    assert out["config_echo"]["tolerance"] == 0.05
    assert out["schema_version"] == "1.0"
    assert out["incompatibility_warnings"] == []


def test_audit_warns_on_eo_with_pp():
    out = json.loads(run("audit", *GRANT, "--metrics", "EO,PP").output)
    assert any(w["citation"] == "Chouldechova (2017)" for w in out["incompatibility_warnings"])


def test_audit_symmetric_all_satisfied():
    res = run("audit", "--data", str(fixture_path("symmetric.csv")), "--label-col", "y", "--pred-col", "yhat",
              "--score-col", "score", "--group-col", "group", "--metrics", "all")
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert out["metric_errors"] == []
    assert len(out["metric_results"]) >= 10
    assert "calibration_tables" in out


def test_missing_group_col():
    res = run("audit", "--data", str(fixture_path("grant.csv")), "--label-col", "y", "--pred-col", "yhat")
    assert res.exit_code == 2
    assert "--group-col" in res.output


def test_bad_data_exits_2(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("y,yhat,group\n1,1,A\n7,0,B\n")
    res = run("audit", "--data", str(p), "--label-col", "y", "--pred-col", "yhat", "--group-col", "group")
    assert res.exit_code == 2
    res = run("audit", "--data", str(tmp_path / "nope.csv"), "--label-col", "y", "--pred-col", "yhat",
              "--group-col", "group")
    assert res.exit_code == 2


def test_metric_precondition_is_reported_not_fatal():
    res = run("audit", *GRANT, "--metrics", "EMO,BG_AUC")
    assert res.exit_code == 1
    errors = json.loads(res.output)["metric_errors"]
    assert [e["metric_id"] for e in errors] == ["BG_AUC"]


def test_unknown_metric():
    assert run("audit", *GRANT, "--metrics", "XYZ").exit_code == 2


def test_repeated_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("audit", *GRANT, "--metrics", "all", "--out", str(out)).exit_code == 1
    assert a.read_bytes() == b.read_bytes()


def test_markdown_output():
    res = run("audit", *GRANT, "--metrics", "EMO,PP", "--format", "md")
    assert res.exit_code == 1
    assert res.output.startswith("#")
    assert "EMO" in res.output and "PP" in res.output


def test_tolerance_changes_verdict():
    res = run("audit", *GRANT, "--metrics", "EMO", "--tolerance", "0.6")
    assert res.exit_code == 0
    assert json.loads(res.output)["config_echo"]["tolerance"] == 0.6


def test_threshold_from_scores():
    res = run("audit", "--data", str(fixture_path("grant.csv")), "--label-col", "y", "--score-col", "score",
              "--group-col", "group", "--threshold", "0.5", "--metrics", "EMO")
    out = json.loads(res.output)
    assert by_id(out)["EMO"]["parity_gap"] == pytest.approx(0.515, abs=5e-4)
    assert out["config_echo"]["threshold"] == 0.5


class TestDiagnose:
    def test_grant(self):
        res = run("diagnose", *GRANT)
        d = json.loads(res.output)["diagnostics"]
        assert d["base_rate_per_group"]["G1"] == pytest.approx(0.827, abs=5e-3)
        assert d["base_rates_equal"] is False
        # 10/110 selected against 100/110
        assert d["four_fifths_ratio"] == pytest.approx(0.1)
        assert res.exit_code == 1

    def test_berkeley_fails_four_fifths(self):
        res = run("diagnose", *BERKELEY)
        d = json.loads(res.output)["diagnostics"]
        assert d["four_fifths_ratio"] == pytest.approx(0.781, abs=1e-3)
        assert d["four_fifths_pass"] is False
        assert res.exit_code == 1

    def test_markdown(self):
        assert "four-fifths" in run("diagnose", *BERKELEY, "--format", "md").output.lower()


class TestSelect:
    @pytest.mark.parametrize("name,metrics", [
        ("recidivism", ["BG_AUC"]), ("cv_evaluation", ["SP"]), ("spam_filter", ["BG_ACC"]),
    ])
    def test_context_files(self, name, metrics):
        res = run("select", "--context", str(CONTEXTS.joinpath(f"{name}.json")))
        assert res.exit_code == 0, res.output
        out = json.loads(res.output)
        assert out["recommendation"]["metrics"] == metrics
        assert out["disclaimer"]
        assert out["reconstructed_tree_edges"]

    def test_idempotent(self):
        path = str(CONTEXTS.joinpath("recidivism.json"))
        assert run("select", "--context", path).output == run("select", "--context", path).output

    def test_interactive_spam(self):
        answers = "\n".join(["predicted_outcome", "classification", "yes", "no", "binary", "fixed",
                             "yes", "equal", "yes"]) + "\n"
        res = run("select", "--interactive", input=answers)
        assert res.exit_code == 0, res.output
        assert json.loads(res.stdout)["recommendation"]["metrics"] == ["BG_ACC"]
        assert "[node 14]" in res.stderr

    def test_malformed_context(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"assessment_target": "predicted_outcome", "model_type": "svm"}))
        res = run("select", "--context", str(p))
        assert res.exit_code == 2
        assert "model_type" in res.output

    def test_auto_without_data(self, tmp_path):
        ctx = json.loads(CONTEXTS.joinpath("recidivism.json").read_text())
        ctx["dataset_balanced"] = "auto"
        p = tmp_path / "c.json"
        p.write_text(json.dumps(ctx))
        assert run("select", "--context", str(p)).exit_code == 2
        res = run("select", "--context", str(p), *GRANT)
        assert res.exit_code == 0
        assert json.loads(res.output)["recommendation"]["metrics"] == ["BG_AUC"]

    def test_needs_one_source(self):
        assert run("select").exit_code == 2


def test_report_combines_everything():
    res = run("report", *GRANT, "--metrics", "EO,PP", "--context", str(CONTEXTS.joinpath("spam_filter.json")))
    assert res.exit_code == 1
    out = json.loads(res.output)
    assert out["recommendation"]["metrics"] == ["BG_ACC"]
    assert out["diagnostics"]["base_rates_equal"] is False
    # the context claims equal base rates; the data says otherwise
    assert any("base_rates_equal" in w for w in out["recommendation"]["warnings"])
    assert {r["metric_id"] for r in out["metric_results"]} == {"EO", "PP"}
