import json
import subprocess
import sys

import pytest

from ofl import cli
from ofl.analysis import HierarchyResult
from ofl.cli import main


@pytest.fixture(autouse=True)
def out_root(tmp_path, monkeypatch):
    monkeypatch.setenv("OFL_OUT", str(tmp_path / "runs"))
    return tmp_path / "runs"


def test_list_catalogs(capsys):
    assert main(["list", "spaces"]) == 0
    assert len(capsys.readouterr().out.strip().split("\n")) == 6
    assert main(["list", "maps"]) == 0
    names = {line.split()[0] for line in capsys.readouterr().out.strip().split("\n")}
    assert {"sa", "square", "step", "shift_lp", "prus"} <= names
    assert main(["list", "scenarios"]) == 0
    names = {line.split()[0] for line in capsys.readouterr().out.strip().split("\n")}
    assert {"example-3-5", "example-4-4", "remark-4-6", "example-4-7", "remark-5-8"} <= names


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ofl", "list", "spaces"], capture_output=True, text=True)
    assert res.returncode == 0 and "interval" in res.stdout


def test_analyze_step_scenario(out_root, capsys):
    assert main(["analyze", "--scenario", "remark-4-6"]) == 0
    out = out_root / "analyze-remark-4-6-s0"
    rep = json.loads((out / "report.json").read_text())
    assert abs(rep["report"]["k_orbit"] - 2.0) <= 1e-9
    assert (out / "summary.csv").read_text().startswith("space,action,law")
    assert (out / "witnesses.csv").exists()


def test_solve_square_scenario(tmp_path):
    out = tmp_path / "solve"
    assert main(["solve", "--scenario", "example-4-4", "--out", str(out), "--method", "orbit_center"]) == 0
    trace = json.loads((out / "trace.json").read_text())["orbit_center"]
    assert trace["outcome"]["kind"] == "converged" and abs(trace["steps"][-1]["x"]) < 1e-9
    assert "recheck" in (out / "summary.csv").read_text().split("\n")[0]


def test_usage_errors_exit_one(tmp_path, capsys):
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["analyze"]) == 1
    assert main(["analyze", "--scenario", "no-such-scenario"]) == 1
    assert main(["analyze", "--scenario", "remark-4-6", "--workers", "0"]) == 1
    assert main(["repro", "--only", "x"]) == 1
    assert main(["repro", "--only", "42"]) == 1
    assert main(["kappa", "--space", "nonsense"]) == 1
    assert main(["analyze", "--config", str(tmp_path / "missing.json")]) == 1
    assert "ofl: error" in capsys.readouterr().err


def _scenario(**over):
    base = {"version": 1, "name": "tmp", "kind": "analyze", "seed": 3, "space": {"type": "interval"},
            "action": {"generators": ["square"]}, "plan": {"n_pairs": 16, "horizon": 8},
            "solver": {"x0": 0.9, "methods": ["picard", "orbit_center"]}}
    base.update(over)
    return base


@pytest.mark.parametrize("bad", [
    {"colour": "red"},
    {"plan": {"n_pairs": 16, "horizon": 8, "bogus": 1}},
    {"version": 2},
    {"space": {"type": "interval", "width": 3}},
    {"action": {"generators": ["not-a-map"]}},
    {"seed": -1},
])
def test_malformed_scenarios_are_rejected(tmp_path, bad):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(_scenario(**bad)))
    assert main(["analyze", "--config", str(f)]) == 1


def test_scenario_without_seed_is_rejected(tmp_path):
    data = _scenario()
    del data["seed"]
    f = tmp_path / "s.json"
    f.write_text(json.dumps(data))
    assert main(["analyze", "--config", str(f)]) == 1


def test_invariant_violation_exits_two(tmp_path, monkeypatch):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(_scenario()))
    monkeypatch.setattr(cli, "check_hierarchy", lambda rep: HierarchyResult(False, {"orbit_le_uniform": False}))
    assert main(["analyze", "--config", str(f), "--out", str(tmp_path / "o")]) == 2
    assert json.loads((tmp_path / "o" / "report.json").read_text())["hierarchy"] == {"orbit_le_uniform": False}


def test_failed_residual_recheck_exits_two(tmp_path, monkeypatch):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(_scenario()))
    monkeypatch.setattr(cli, "residual", lambda act, x: 1.0)
    assert main(["solve", "--config", str(f), "--out", str(tmp_path / "o")]) == 2


def test_output_root_and_overrides(out_root):
    assert main(["analyze", "--scenario", "remark-4-6", "--seed", "5", "--horizon", "8"]) == 0
    rep = json.loads((out_root / "analyze-remark-4-6-s5" / "report.json").read_text())
    assert rep["report"]["seed"] == 5 and rep["report"]["horizon"] == 8


def test_epsilon_override(tmp_path):
    out = tmp_path / "e"
    assert main(["solve", "--scenario", "example-4-4", "--out", str(out), "--epsilon", "1e-3",
                 "--method", "lifschitz"]) == 0
    cfg = json.loads((out / "report.json").read_text())["config"]
    assert cfg["epsilon"] == 1e-3


def test_same_seed_gives_identical_csv(tmp_path):
    for run in ("a", "b"):
        assert main(["analyze", "--scenario", "example-3-5", "--out", str(tmp_path / run)]) == 0
        assert main(["solve", "--scenario", "remark-4-6", "--out", str(tmp_path / f"s{run}")]) == 0
        assert main(["kappa", "--space", "interval", "--budget", "2000", "--out", str(tmp_path / f"k{run}")]) == 0
    for name in ("summary.csv", "witnesses.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    for name in ("summary.csv", "trace_orbit_center.csv"):
        assert (tmp_path / "sa" / name).read_bytes() == (tmp_path / "sb" / name).read_bytes()
    assert (tmp_path / "ka" / "summary.csv").read_bytes() == (tmp_path / "kb" / "summary.csv").read_bytes()


def test_kappa_and_normal_commands(tmp_path):
    assert main(["kappa", "--space", '{"type": "maxnorm", "n": 2}', "--budget", "3000",
                 "--out", str(tmp_path / "k")]) == 0
    rep = json.loads((tmp_path / "k" / "report.json").read_text())
    assert rep["upper"] <= 1.1 and rep["certificate"] is not None
    assert main(["normal", "--scenario", "normal-interval", "--n-sets", "10", "--out", str(tmp_path / "n")]) == 0
    head, row = (tmp_path / "n" / "summary.csv").read_text().strip().split("\n")
    assert head == "space,kappa_lo,kappa_hi,normal_est,budget,seed" and row.startswith("interval,,,0.5")


def test_repro_subset(tmp_path):
    assert main(["repro", "--only", "1", "--out", str(tmp_path / "r")]) == 0
    lines = (tmp_path / "r" / "summary.csv").read_text().strip().split("\n")
    assert lines[0] == "criterion,check,value,target,pass,invariant"
    assert all(line.startswith("1,") for line in lines[1:])
