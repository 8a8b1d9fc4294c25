"""Command-line pipeline: popgen -> grid -> simulate -> analyze -> compare.

Exit codes: 0 success, 2 usage error, 1 data error. Messages go to stderr.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .compare import METRICS, DayComparisonError, HcaSettings, distance_matrix, worker_count
from .friendsim import read_scenario, scenario_grid, write_scenario
from .graph import (
    basic_stats,
    clustering_stats,
    degree_distribution,
    network_portrait,
    shortest_path_distribution,
)
from .heat import BASES
from .io import DataError, format_csv, write_text
from .popgen import ConfigError, PopConfig, Population, sample_population
from .runio import read_run, simulate_to_dir

METRICS_HEADER = ("day", "active_nodes", "edges", "components", "avg_clustering",
                  "nonzero_clustering_count")


class UsageError(Exception):
    pass


def _metric_list(text: str) -> list[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in METRICS]
    if bad:
        raise UsageError(f"unknown metric(s) {', '.join(bad)}; choose from {', '.join(METRICS)}")
    return names


def _hca_settings(args) -> HcaSettings:
    return HcaSettings(n_coeffs=args.hca_coeffs, basis=args.hca_basis, mode=args.hca_mode)


def cmd_popgen(args) -> None:
    cfg = PopConfig.read(args.config)
    pop = sample_population(cfg, args.seed)
    pop.write(args.out)
    print(f"wrote {pop.size} agents in {cfg.num_households} households to {args.out}", file=sys.stderr)


def cmd_grid(args) -> None:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out}: {exc.strerror}") from exc
    grid = scenario_grid(args.seed)
    for p in grid:
        write_scenario(out / f"scenario_{p.scenario_id:02d}.txt", p)
    print(f"wrote {len(grid)} scenario files to {out}", file=sys.stderr)


def _simulate_one(job):
    pop_path, scenario_path, days, out = job
    pop = Population.read(pop_path)
    params, tuning = read_scenario(scenario_path)
    run_id = f"s{params.scenario_id:02d}_seed{params.seed}"
    simulate_to_dir(pop, params, tuning, days, Path(out) / run_id)
    return run_id


def cmd_simulate(args) -> None:
    if args.days < 1:
        raise UsageError("--days must be >= 1")
    # fail fast on unreadable inputs before fanning out
    Population.read(args.pop)
    for path in args.scenario:
        read_scenario(path)
    jobs = [(args.pop, path, args.days, args.out) for path in args.scenario]
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            done = list(pool.map(_simulate_one, jobs))
    else:
        done = [_simulate_one(job) for job in jobs]
    for run_id in done:
        print(f"wrote run {Path(args.out) / run_id}", file=sys.stderr)


def _sidecar(out: Path, metric: str) -> Path:
    return out.with_name(f"{out.stem}.{metric}.csv")


def cmd_analyze(args) -> None:
    metrics = _metric_list(args.metrics)
    run = read_run(args.run)
    out = Path(args.out)
    rows = []
    for t, g in enumerate(run.snapshots):
        active, edges, comps = basic_stats(g)
        _, avg, nonzero = clustering_stats(g)
        rows.append((t, active, edges, comps, avg, nonzero))
    write_text(out, format_csv(METRICS_HEADER, rows))

    hca = _hca_settings(args)
    for metric in metrics:
        if metric in ("degree", "spd"):
            describe = degree_distribution if metric == "degree" else shortest_path_distribution
            body = [(t, k, c) for t, g in enumerate(run.snapshots) for k, c in describe(g).bins.items()]
            text = format_csv(("day", "value", "count"), body)
        elif metric == "portrait":
            body = []
            for t, g in enumerate(run.snapshots):
                p = network_portrait(g)
                body += [(t, l, k, int(p.rows[l, k])) for l, k in zip(*p.rows.nonzero())]
            text = format_csv(("day", "l", "k", "count"), body)
        else:
            feats = run.features("hca", hca)
            header = ("day",) + tuple(f"c{i}" for i in range(hca.n_coeffs))
            text = format_csv(header, ((t, *f.values.tolist()) for t, f in enumerate(feats)))
        write_text(_sidecar(out, metric), text)
    print(f"wrote {len(rows)} days of metrics to {out}", file=sys.stderr)


def cmd_compare(args) -> None:
    if args.metric not in METRICS:
        raise UsageError(f"unknown metric {args.metric}; choose from {', '.join(METRICS)}")
    if len(args.runs) < 2:
        raise UsageError("compare needs at least two runs")
    runs = [read_run(d) for d in args.runs]
    try:
        matrix = distance_matrix(runs, args.metric, _hca_settings(args))
    except DayComparisonError as exc:
        raise DataError(f"comparison failed on {exc}") from exc
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    write_text(args.out, matrix.to_csv())
    print(f"wrote {len(runs)}x{len(runs)} {args.metric} distance matrix to {args.out}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socionet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("popgen", help="sample a synthetic population")
    p.add_argument("--config", required=True, help="key = value population config")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_popgen)

    p = sub.add_parser("grid", help="write the 36 scenario files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("simulate", help="run scenarios over a population")
    p.add_argument("--pop", required=True)
    p.add_argument("--scenario", required=True, nargs="+")
    p.add_argument("--days", type=int, default=180)
    p.add_argument("--out", required=True, help="directory receiving one subdirectory per run")
    p.set_defaults(func=cmd_simulate)

    def hca_options(p):
        p.add_argument("--hca-coeffs", type=int, default=20)
        p.add_argument("--hca-basis", choices=BASES, default="orthonormal")
        p.add_argument("--hca-mode", choices=("walk", "exact"), default="walk")

    p = sub.add_parser("analyze", help="per-day descriptors of one run")
    p.add_argument("--run", required=True)
    p.add_argument("--metrics", default="", help=f"comma list from {','.join(METRICS)}")
    p.add_argument("--out", required=True)
    hca_options(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="all-pairs run distance matrix")
    p.add_argument("--runs", required=True, nargs="+")
    p.add_argument("--metric", required=True)
    p.add_argument("--out", required=True)
    hca_options(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"socionet {args.command}: {exc}", file=sys.stderr)
        return 2
    except (DataError, ConfigError) as exc:
        print(f"socionet {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
