"""On-disk layout of a simulated run.

A run directory holds ``run.txt`` (key-value metadata: run id, day count,
agent count, threshold, population hash, scenario and tuning), ``weights.txt``
(``t u v w`` lines, one per directed friendship per day) and one edge list per
day under ``snapshots/``. Edge lists only name agents that have an edge, so
the agent universe is taken from ``run.txt``.
"""
from __future__ import annotations

from pathlib import Path

from .compare import RunSeries
from .friendsim import ScenarioParams, SimTuning, run_scenario, scenario_to_kv
from .graph import format_edgelist, parse_edgelist
from .io import DataError, format_kv, read_kv, write_text
from .popgen import Population

META_FILE = "run.txt"
WEIGHTS_FILE = "weights.txt"
SNAPSHOT_DIR = "snapshots"


def snapshot_name(t: int, days: int) -> str:
    return f"day_{t:0{max(3, len(str(days - 1)))}d}.txt"


def simulate_to_dir(pop: Population, params: ScenarioParams, tuning: SimTuning, days: int,
                    out_dir, threshold: float = 0.3) -> RunSeries:
    """Run one scenario and write its directory; returns the in-memory series."""
    out = Path(out_dir)
    try:
        (out / SNAPSHOT_DIR).mkdir(parents=True, exist_ok=True)
        weights = open(out / WEIGHTS_FILE, "w")
    except OSError as exc:
        raise DataError(f"cannot write run directory {out}: {exc.strerror}") from exc

    def dump(t, state):
        weights.write("".join(f"{t} {i} {j} {w:.6f}\n" for i, j, w in state.edge_weights()))

    with weights:
        series = run_scenario(pop, params, tuning, days, threshold, on_day=dump)
    meta = {
        "run_id": series.run_id,
        "days": str(days),
        "agents": str(pop.size),
        "threshold": repr(threshold),
        "population_hash": pop.config_hash or "NA",
    }
    meta.update(scenario_to_kv(params, tuning))
    write_text(out / META_FILE, format_kv(meta))
    for t, g in enumerate(series.snapshots):
        write_text(out / SNAPSHOT_DIR / snapshot_name(t, days), format_edgelist(g, f"day {t}"))
    return series


def read_run(run_dir) -> RunSeries:
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise DataError(f"run directory {run_dir} does not exist")
    meta = read_kv(run_dir / META_FILE)
    try:
        days, agents, run_id = int(meta["days"]), int(meta["agents"]), meta["run_id"]
    except (KeyError, ValueError) as exc:
        raise DataError(f"{run_dir / META_FILE}: bad or missing field {exc}") from exc
    snapshots = []
    for t in range(days):
        path = run_dir / SNAPSHOT_DIR / snapshot_name(t, days)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror}") from exc
        try:
            snapshots.append(parse_edgelist(text, range(agents)))
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from exc
    try:
        return RunSeries(run_id, snapshots)
    except ValueError as exc:
        raise DataError(f"{run_dir}: {exc}") from exc
