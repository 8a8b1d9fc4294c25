import filecmp
from pathlib import Path

import pytest

from socionet.cli import main
from socionet.popgen import PopConfig

SMALL = PopConfig(num_households=25, venues={"workplace": 5, "school": 2, "mall": 1, "entertainment": 4})


def pipeline(root: Path, days=6):
    root.mkdir(parents=True, exist_ok=True)
    SMALL.write(root / "pop.cfg")
    assert main(["popgen", "--config", str(root / "pop.cfg"), "--seed", "3", "--out", str(root / "pop.txt")]) == 0
    assert main(["grid", "--out", str(root / "grid")]) == 0
    scen = [str(root / "grid" / f"scenario_{i:02d}.txt") for i in (1, 5, 17)]
    assert main(["simulate", "--pop", str(root / "pop.txt"), "--scenario", *scen,
                 "--days", str(days), "--out", str(root / "runs")]) == 0
    runs = sorted((root / "runs").iterdir())
    assert main(["analyze", "--run", str(runs[0]), "--metrics", "degree,spd,portrait,hca",
                 "--hca-coeffs", "5", "--out", str(root / "metrics.csv")]) == 0
    assert main(["compare", "--runs", *map(str, runs), "--metric", "degree",
                 "--out", str(root / "matrix.csv")]) == 0
    return runs


def test_grid_writes_36_files(tmp_path, capsys):
    assert main(["grid", "--out", str(tmp_path / "g")]) == 0
    assert len(list((tmp_path / "g").iterdir())) == 36
    out = capsys.readouterr()
    assert out.out == "" and "36" in out.err


def test_full_pipeline(tmp_path):
    runs = pipeline(tmp_path)
    assert [r.name for r in runs] == ["s01_seed0", "s05_seed0", "s17_seed0"]
    rows = (tmp_path / "metrics.csv").read_text().splitlines()
    assert rows[0] == "day,active_nodes,edges,components,avg_clustering,nonzero_clustering_count"
    assert [int(r.split(",")[0]) for r in rows[1:]] == list(range(6))
    for metric in ("degree", "spd", "portrait", "hca"):
        assert (tmp_path / f"metrics.{metric}.csv").exists()
    matrix = (tmp_path / "matrix.csv").read_text().splitlines()
    assert matrix[0] == "s01_seed0,s05_seed0,s17_seed0" and len(matrix) == 4
    weights = (runs[0] / "weights.txt").read_text().splitlines()
    t, u, v, w = weights[0].split()
    assert t == "0" and len(w.split(".")[1]) == 6


def test_pipeline_is_byte_reproducible(tmp_path):
    pipeline(tmp_path / "a")
    pipeline(tmp_path / "b")
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    stack = [cmp]
    while stack:
        c = stack.pop()
        assert not c.left_only and not c.right_only
        _, mismatch, errors = filecmp.cmpfiles(c.left, c.right, c.common_files, shallow=False)
        assert not mismatch and not errors
        stack.extend(c.subdirs.values())


def test_unknown_metric_is_usage_error(tmp_path, capsys):
    runs = pipeline(tmp_path, days=2)
    out = tmp_path / "bogus.csv"
    assert main(["compare", "--runs", *map(str, runs), "--metric", "bogus", "--out", str(out)]) == 2
    assert not out.exists()
    assert main(["analyze", "--run", str(runs[0]), "--metrics", "degree,nope", "--out", str(out)]) == 2
    assert not out.exists()
    assert "bogus" in capsys.readouterr().err


def test_missing_run_is_data_error(tmp_path, capsys):
    assert main(["compare", "--runs", str(tmp_path / "x"), str(tmp_path / "y"),
                 "--metric", "degree", "--out", str(tmp_path / "m.csv")]) == 1
    assert main(["analyze", "--run", str(tmp_path / "x"), "--out", str(tmp_path / "m.csv")]) == 1
    assert "does not exist" in capsys.readouterr().err


def test_bad_inputs(tmp_path):
    assert main(["popgen", "--config", str(tmp_path / "none.cfg"), "--seed", "1", "--out", "x"]) == 1
    (tmp_path / "bad.cfg").write_text("household_size_dist = 1:0.5 2:0.2\n")
    assert main(["popgen", "--config", str(tmp_path / "bad.cfg"), "--seed", "1", "--out", "x"]) == 1
    assert main(["popgen", "--seed", "1"]) == 2
    assert main([]) == 2
    assert main(["simulate", "--pop", "p", "--scenario", "s", "--days", "0", "--out", "o"]) == 2


def test_analyze_row_count_matches_days(tmp_path):
    runs = pipeline(tmp_path, days=9)
    assert main(["analyze", "--run", str(runs[1]), "--out", str(tmp_path / "m2.csv")]) == 0
    assert len((tmp_path / "m2.csv").read_text().splitlines()) == 10
