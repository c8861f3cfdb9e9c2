import json
import subprocess
import sys

from routegame.cli import main
from routegame.scenario_io import load_scenario, save_scenario

from conftest import line_scenario


def run(*argv):
    return main(list(argv))


def test_gen_validate_solve_pipeline(tmp_path, capsys):
    scenario_path = tmp_path / "grid.json"
    assert run("gen", "grid", "--rows", "4", "--cols", "4", "--seed", "5",
               "--budget", "2", "--out", str(scenario_path)) == 0
    assert run("validate", "--scenario", str(scenario_path)) == 0
    out_dir = tmp_path / "sol"
    assert run("solve", "--scenario", str(scenario_path), "--out", str(out_dir),
               "--format", "json") == 0
    captured = capsys.readouterr().out
    assert "value=" in captured
    result = json.loads((out_dir / "solution.json").read_text())
    assert result["gap"] <= 0.1


def test_gen_line_and_solve(tmp_path, capsys):
    path = tmp_path / "line.json"
    assert run("gen", "line", "--weights", "2,3", "--values", "3,4",
               "--budget", "3", "--out", str(path)) == 0
    out_dir = tmp_path / "sol"
    assert run("solve", "--scenario", str(path), "--epsilon", "0.01",
               "--out", str(out_dir)) == 0
    result = json.loads((out_dir / "solution.json").read_text())
    assert abs(result["value"] - 6.0) < 1e-9


def test_validate_rejects_broken_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run("validate", "--scenario", str(path)) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run("validate", "--scenario", str(tmp_path / "absent.json")) == 4


def test_exhausted_iterations_exit_code(tmp_path):
    path = tmp_path / "line.json"
    save_scenario(line_scenario(), path)
    out_dir = tmp_path / "sol"
    assert run("solve", "--scenario", str(path), "--max-iters", "1",
               "--out", str(out_dir)) == 3


def test_solve_is_deterministic_across_runs(tmp_path):
    scenario_path = tmp_path / "grid.json"
    run("gen", "grid", "--rows", "4", "--cols", "4", "--seed", "11", "--out",
        str(scenario_path))
    first, second = tmp_path / "a", tmp_path / "b"
    assert run("solve", "--scenario", str(scenario_path), "--out", str(first)) == 0
    assert run("solve", "--scenario", str(scenario_path), "--out", str(second)) == 0
    assert (first / "solution.json").read_bytes() == (second / "solution.json").read_bytes()


def test_solve_is_deterministic_across_processes(tmp_path):
    # Fresh interpreters rule out per-process state (e.g. hash ordering)
    # leaking into artifacts.
    scenario_path = tmp_path / "grid.json"
    run("gen", "grid", "--rows", "4", "--cols", "4", "--seed", "3", "--out",
        str(scenario_path))
    outputs = []
    for name in ("p1", "p2"):
        out_dir = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "routegame.cli", "solve", "--scenario",
             str(scenario_path), "--out", str(out_dir), "--format", "json"],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((out_dir / "solution.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_baseline_fastest_reports_route(tmp_path, capsys):
    path = tmp_path / "line.json"
    save_scenario(line_scenario(), path)
    assert run("baseline", "--scenario", str(path), "--which", "fastest") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["edge_ids"] == [0, 1]
    assert report["worst_case_utility"] == 6.0


def test_baseline_redaware(tmp_path, capsys):
    path = tmp_path / "line.json"
    save_scenario(line_scenario(), path)
    assert run("baseline", "--scenario", str(path), "--which", "redaware") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["edge_ids"] == [0, 1]


def test_robustness_table_csv(tmp_path, capsys):
    path = tmp_path / "grid.json"
    run("gen", "grid", "--rows", "3", "--cols", "3", "--seed", "8", "--out", str(path))
    capsys.readouterr()
    assert run("robustness", "--scenario", str(path), "--budgets", "0..2") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("planned\\true,0,1,2")
    assert len(lines) == 4
    first_row = [float(x) for x in lines[1].split(",")[1:]]
    assert first_row[0] == 1.0  # true budget 0 leaves throughput at 1


def test_budget_flag_overrides_scenario(tmp_path, capsys):
    path = tmp_path / "line.json"
    save_scenario(line_scenario(), path)
    out_dir = tmp_path / "sol"
    assert run("solve", "--scenario", str(path), "--budget", "0",
               "--out", str(out_dir)) == 0
    result = json.loads((out_dir / "solution.json").read_text())
    assert result["value"] == 2.0


def test_prepare_applies_pipeline(tmp_path):
    src = tmp_path / "raw.json"
    doc = {
        "format_version": "1",
        "nodes": [
            {"id": 0, "lat": 0.0, "lon": 0.0},
            {"id": 1, "lat": 0.001, "lon": 0.0},
            {"id": 2, "lat": 0.002, "lon": 0.0},
        ],
        "edges": [
            {"id": 0, "tail": 0, "head": 1, "T": 111.0, "P": 1.0, "C": 1,
             "tags": ["bridge"]},
            {"id": 1, "tail": 1, "head": 2, "T": 111.0, "P": 1.0, "C": 1},
        ],
        "start": 0,
        "release": 2,
        "budget": 0,
    }
    src.write_text(json.dumps(doc), encoding="utf-8")
    out = tmp_path / "prepared.json"
    assert run("prepare", "--scenario", str(src), "--budget", "3", "--out", str(out)) == 0
    prepared = load_scenario(out)
    assert prepared.budget == 3
    assert prepared.graph.edge(0).interdiction_penalty == 3.0
    assert prepared.graph.edge(0).kill_prob == 0.5
    assert prepared.graph.edge(1).interdiction_penalty == 1.0
    assert all(e.interdiction_cost >= 1 for e in prepared.graph.edges)
