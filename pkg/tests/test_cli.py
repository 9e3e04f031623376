import json

import pytest
from click.testing import CliRunner

from consist_submod.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_help_lists_commands(runner):
    out = invoke(runner, ["--help"]).output
    for cmd in ("gen", "run", "audit", "reproduce"):
        assert cmd in out
    assert "gi" in invoke(runner, ["gen", "--help"]).output
    assert "robustness" in invoke(runner, ["audit", "--help"]).output
    assert "checkpoint" in invoke(runner, ["run", "--help"]).output


def test_gen_outputs(runner, tmp_path):
    invoke(runner, ["gen", "gi", "--m", 3, "--out", tmp_path / "g.json"])
    assert len(json.loads((tmp_path / "g.json").read_text())["values"]) == 16
    invoke(runner, ["gen", "lifted", "--m", 2, "--k", 2, "--out", tmp_path / "l.json"])
    assert len(json.loads((tmp_path / "l.json").read_text())["values"]) == 32
    invoke(runner, ["gen", "align", "--kappa", 4, "--out", tmp_path / "a.json"])
    data = json.loads((tmp_path / "a.json").read_text())
    assert data["universe_size"] == 8 and data["kind"] == "coverage"


def test_unknown_generator(runner):
    res = runner.invoke(main, ["gen", "nope"])
    assert res.exit_code == 2


def test_run_checkpoint_is_deterministic(runner, tmp_path):
    inst = tmp_path / "l.json"
    invoke(runner, ["gen", "lifted", "--m", 3, "--k", 2, "--out", inst])
    for name in ("t1.csv", "t2.csv"):
        res = invoke(runner, ["run", "--instance", inst, "--algorithm", "checkpoint", "--k", 4,
                              "--epsilon", 0.5, "--seed", 7, "--trace", tmp_path / name])
        assert res.exit_code == 0
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()
    res = invoke(runner, ["audit", "consistency", "--trace", tmp_path / "t1.csv", "--c", 5])
    assert res.exit_code == 0 and json.loads(res.output)["passed"]
    res = invoke(runner, ["audit", "consistency", "--trace", tmp_path / "t1.csv", "--c", 0])
    assert res.exit_code == 1


def test_run_certificate_json(runner, tmp_path):
    inst = tmp_path / "g.json"
    invoke(runner, ["gen", "gi", "--m", 3, "--out", inst])
    res = invoke(runner, ["run", "--instance", inst, "--algorithm", "certificate", "--kappa", 2,
                          "--gamma", 0.84, "--eta", 0.1, "--seed", 1])
    data = json.loads(res.output)
    assert data["gamma"] == 0.84 and data["kappa"] == 2 and "certificate_hit" in data


def test_robustness_pipeline(runner, tmp_path):
    inst, dist = tmp_path / "a.json", tmp_path / "d.json"
    invoke(runner, ["gen", "align", "--kappa", 2, "--out", inst])
    invoke(runner, ["run", "--instance", inst, "--algorithm", "minmax", "--benchmark", "weak",
                    "--seed", 0, "--out", dist])
    res = invoke(runner, ["audit", "robustness", "--dist", dist, "--instance", inst,
                          "--mode", "weak"])
    assert json.loads(res.output)["details"]["alpha_measured"] == pytest.approx(1)


def test_config_precedence(runner, tmp_path):
    inst, cfg = tmp_path / "l.json", tmp_path / "c.json"
    invoke(runner, ["gen", "lifted", "--m", 2, "--k", 2, "--out", inst])
    cfg.write_text(json.dumps({"k": 2, "algorithm": "static"}))
    res = invoke(runner, ["run", "--config", cfg, "--instance", inst, "--seed", 0])
    assert json.loads(res.output)["algorithm"] == "static"
    res = invoke(runner, ["run", "--config", cfg, "--instance", inst, "--seed", 0,
                          "--algorithm", "single-swap"])
    assert json.loads(res.output)["algorithm"] == "single-swap"


def test_default_seed_is_printed(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("CONSIST_SUBMOD_SEED", "123")
    inst = tmp_path / "g.json"
    invoke(runner, ["gen", "gi", "--m", 2, "--out", inst])
    res = runner.invoke(main, ["run", "--instance", str(inst), "--algorithm", "greedy",
                               "--kappa", 1])
    assert "seed: 123" in res.output


def test_audit_lemma(runner):
    res = invoke(runner, ["audit", "lemma", "--name", "refined-greedy", "--trials", 20,
                          "--seed", 7])
    assert res.exit_code == 0 and "[PASS] refined-greedy" in res.output


def test_reproduce_subset(runner):
    res = invoke(runner, ["reproduce", "--only", 5, "--seed", 1])
    assert res.exit_code == 0 and "criterion 5" in res.output
