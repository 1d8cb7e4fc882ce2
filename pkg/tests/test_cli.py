"""Subprocess-level command-line checks: manifests, files, and exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np

from swarmselect.data import load_csv
from swarmselect.pipeline import hex_to_mask

CLI = [sys.executable, "-m", "swarmselect.cli"]


def run_cli(*argv, cwd=None):
    return subprocess.run(CLI + list(argv), capture_output=True, text=True, cwd=cwd)


def grid_config(tmp_path, **over):
    payload = {
        "synth": {"n_rows": 120, "n_cols": 10, "n_informative": 3,
                  "class_separation": 3.0, "seed": 11},
        "seed": 9,
        "num_agents": 6,
        "max_iterations": 5,
        "cv_k": 3,
        "rf_trees": 10,
        "svm_epochs": 50,
        "accuracy_gate": 0.0,
        "cv_gate": 0.0,
        "surrogate": "knn",
    }
    payload.update(over)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload))
    return path


def test_synth_passthrough(tmp_path):
    out = tmp_path / "d.csv"
    proc = run_cli("synth", "--rows", "200", "--cols", "20", "--informative", "4",
                   "--seed", "7", "-o", str(out))
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads(proc.stdout)
    assert [m["path"] for m in manifest] == ["d.csv", "d.csv.mask.json"]

    ds = load_csv(out)
    assert ds.n_rows == 200 and ds.n_cols == 20
    sidecar = json.loads((tmp_path / "d.csv.mask.json").read_text())
    mask = hex_to_mask(sidecar["true_mask"], 20)
    assert int(mask.sum()) == 4
    assert sidecar["informative"] == [n for n, b in zip(ds.column_names, mask) if b]

    first = out.read_bytes()
    assert run_cli("synth", "--rows", "200", "--cols", "20", "--informative", "4",
                   "--seed", "7", "-o", str(out)).returncode == 0
    assert out.read_bytes() == first


def test_rank_writes_rankings(tmp_path):
    data = tmp_path / "d.csv"
    run_cli("synth", "--rows", "80", "--cols", "6", "--informative", "2",
            "--seed", "3", "-o", str(data))
    out = tmp_path / "rankings"
    proc = run_cli("rank", "--data", str(data), "--method", "all",
                   "--formats", "json,csv,svg", "-o", str(out))
    assert proc.returncode == 0, proc.stderr
    names = sorted(m["path"] for m in json.loads(proc.stdout))
    assert names == [
        "ranking_heatmap.svg",
        "ranking_pearson.csv", "ranking_pearson.json",
        "ranking_relief.csv", "ranking_relief.json",
        "ranking_spearman.csv", "ranking_spearman.json",
    ]
    payload = json.loads((out / "ranking_relief.json").read_text())
    assert payload["method"] == "relief"
    assert len(payload["features"]) == 6
    assert payload["features"][0]["rank"] == 1


def test_rank_single_class_exit_2(tmp_path):
    data = tmp_path / "one_class.csv"
    rows = ["a,b,label"] + [f"{i},{i * 2},1" for i in range(8)]
    data.write_text("\n".join(rows) + "\n")
    proc = run_cli("rank", "--data", str(data), "--method", "relief",
                   "-o", str(tmp_path / "r"))
    assert proc.returncode == 2
    assert proc.stdout == ""
    assert proc.stderr.startswith("swarmselect: error: data: ")
    assert proc.stderr.count("\n") == 1


def test_select_then_evaluate(tmp_path):
    data = tmp_path / "d.csv"
    run_cli("synth", "--rows", "100", "--cols", "8", "--informative", "2",
            "--seed", "5", "-o", str(data))
    sel_dir = tmp_path / "sel"
    proc = run_cli("select", "--data", str(data), "--algorithm", "pso",
                   "--agents", "6", "--iterations", "5", "--seed", "4",
                   "-o", str(sel_dir))
    assert proc.returncode == 0, proc.stderr
    selection = json.loads((sel_dir / "selection.json").read_text())
    mask = hex_to_mask(selection["best_mask"], selection["n_features"])
    assert int(mask.sum()) == selection["n_selected"] >= 1
    assert len(selection["fitness_history"]) == 5 + 1
    assert selection["evaluations"] <= selection["budget"]

    ds = load_csv(data)
    expect = [n for n, b in zip(ds.column_names, mask) if b]
    assert selection["selected_features"] == expect

    ev_dir = tmp_path / "ev"
    proc = run_cli("evaluate", "--data", str(data),
                   "--mask-file", str(sel_dir / "selection.json"),
                   "--classifier", "knn", "--cv", "4", "--seed", "4",
                   "-o", str(ev_dir))
    assert proc.returncode == 0, proc.stderr
    ev = json.loads((ev_dir / "evaluation.json").read_text())
    assert ev["mask"] == selection["best_mask"]
    assert 0.0 <= ev["test_metrics"]["accuracy"] <= 1.0
    assert len(ev["cv_accuracies"]) == 4

    proc = run_cli("evaluate", "--data", str(data), "--mask", selection["best_mask"],
                   "--classifier", "knn", "--cv", "4", "--seed", "4",
                   "-o", str(tmp_path / "ev2"))
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "ev2" / "evaluation.json").read_text()) == ev


def test_grid_full_sweep_row_count(tmp_path):
    cfg = grid_config(tmp_path)
    out = tmp_path / "report"
    proc = run_cli("grid", "--config", str(cfg), "-o", str(out))
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads(proc.stdout)
    assert [m["path"] for m in manifest] == [
        "results.json", "results.csv", "summary.csv", "accuracy.svg", "best.json"]

    with open(out / "results.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 63
    assert sorted({r[1] for r in rows[1:]}) == ["bba", "cs", "ga", "gsa",
                                                "gwo", "pso", "woa"]
    results = json.loads((out / "results.json").read_text())
    assert len(results) == 63
    assert all(r["error"] is None for r in results)
    best = json.loads((out / "best.json").read_text())
    accs = [r["test_metrics"]["accuracy"] for r in results]
    assert best["test_metrics"]["accuracy"] == max(accs)


def test_report_reemits_identical_csv(tmp_path):
    cfg = grid_config(tmp_path, selectors=["gsa"], rankers=["pearson"])
    out = tmp_path / "report"
    assert run_cli("grid", "--config", str(cfg), "-o", str(out)).returncode == 0
    re_dir = tmp_path / "re"
    proc = run_cli("report", "--results", str(out / "results.json"),
                   "--formats", "csv", "-o", str(re_dir))
    assert proc.returncode == 0, proc.stderr
    assert (re_dir / "results.csv").read_bytes() == (out / "results.csv").read_bytes()
    assert (re_dir / "summary.csv").read_bytes() == (out / "summary.csv").read_bytes()


def test_grid_flags_override_config(tmp_path):
    cfg = grid_config(tmp_path)
    out = tmp_path / "small"
    proc = run_cli("grid", "--config", str(cfg), "--rankers", "pearson",
                   "--selectors", "ga,pso", "--classifiers", "knn",
                   "-o", str(out), "--formats", "csv")
    assert proc.returncode == 0, proc.stderr
    with open(out / "results.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert [(r[0], r[1], r[2]) for r in rows[1:]] == [
        ("pearson", "ga", "knn"), ("pearson", "pso", "knn")]


def test_usage_errors_exit_1(tmp_path):
    proc = run_cli("prune")
    assert proc.returncode == 1
    assert proc.stderr.startswith("swarmselect: error: usage: ")

    proc = run_cli("synth", "--rows", "50")
    assert proc.returncode == 1
    assert "required" in proc.stderr

    proc = run_cli("select", "--data", "x.csv", "--algorithm", "annealing")
    assert proc.returncode == 1


def test_data_errors_exit_2(tmp_path):
    proc = run_cli("rank", "--data", str(tmp_path / "missing.csv"))
    assert proc.returncode == 2
    assert proc.stderr.startswith("swarmselect: error: data: ")

    bad_cfg = tmp_path / "bad.json"
    bad_cfg.write_text(json.dumps({"synth": {"n_rows": 40, "n_cols": 4,
                                             "n_informative": 1},
                                   "workers": 3}))
    proc = run_cli("grid", "--config", str(bad_cfg), "-o", str(tmp_path / "g"))
    assert proc.returncode == 2
    assert "unknown config keys" in proc.stderr

    two_sources = grid_config(tmp_path)
    proc = run_cli("grid", "--config", str(two_sources), "--data", "d.csv",
                   "-o", str(tmp_path / "g2"))
    assert proc.returncode == 2
    assert "exactly one data source" in proc.stderr


def test_version_flag():
    proc = run_cli("--version")
    assert proc.returncode == 0
    assert proc.stdout.startswith("swarmselect ")
