"""Distances between graphs and between whole simulation runs."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import (
    Distribution,
    Graph,
    Portrait,
    degree_distribution,
    network_portrait,
    shortest_path_distribution,
)
from .heat import HcaCoefficients, HeatWalkConfig, d_hca, graph_hca

METRICS = ("degree", "spd", "portrait", "hca")


class DayComparisonError(ValueError):
    """A per-day comparison failed; ``day`` names the timestep."""

    def __init__(self, day: int, cause: Exception):
        super().__init__(f"day {day}: {cause}")
        self.day = day
        self.cause = cause


def wasserstein1(u: Distribution, v: Distribution) -> float:
    """Earth mover's distance between two normalised integer-valued histograms.

    Integrates |CDF_u - CDF_v| exactly. With integer counts the accumulation
    is done in integers and divided once at the end.
    """
    tu, tv = u.total, v.total
    if not tu or not tv:
        raise ValueError("wasserstein1 needs two distributions with positive mass")
    support = sorted(set(u.bins) | set(v.bins))
    cu = cv = 0
    acc = 0
    for x, nxt in zip(support, support[1:]):
        cu += u.bins.get(x, 0)
        cv += v.bins.get(x, 0)
        acc += abs(cu * tv - cv * tu) * (nxt - x)
    return acc / (tu * tv)


def _portrait_distribution(p: Portrait, shape) -> np.ndarray:
    rows = np.zeros(shape)
    rows[: p.rows.shape[0], : p.rows.shape[1]] = p.rows
    weighted = rows * np.arange(shape[1])[None, :]
    total = weighted.sum()
    if total <= 0:
        raise ValueError("portrait carries no mass")
    return weighted / total


def portrait_divergence(a: Portrait, b: Portrait) -> float:
    """Jensen-Shannon divergence (base 2) between the portraits' P(k, l) = k B[l, k] / sum."""
    shape = (max(a.num_rows, b.num_rows), max(a.num_cols, b.num_cols))
    p = _portrait_distribution(a, shape).ravel()
    q = _portrait_distribution(b, shape).ravel()
    m = 0.5 * (p + q)
    kl_p = np.sum(p[p > 0] * np.log2(p[p > 0] / m[p > 0]))
    kl_q = np.sum(q[q > 0] * np.log2(q[q > 0] / m[q > 0]))
    return float(min(1.0, max(0.0, 0.5 * kl_p + 0.5 * kl_q)))


@dataclass(frozen=True)
class HcaSettings:
    """Shared curve and basis settings so coefficient vectors stay commensurable."""

    n_coeffs: int = 20
    basis: str = "orthonormal"
    s_max: float = 5.0
    m: int = 101
    mode: str = "walk"
    steps: int | None = None
    boundary_fraction: float = 0.02
    laplacian: str = "dirichlet"

    def coefficients(self, g: Graph) -> HcaCoefficients:
        cfg = HeatWalkConfig(self.steps) if self.steps else None
        return graph_hca(g, self.n_coeffs, self.basis, self.s_max, self.m, self.mode, cfg,
                         self.boundary_fraction, self.laplacian)


@dataclass
class RunSeries:
    run_id: str
    snapshots: list[Graph]
    weighted_snapshots: list | None = None
    _features: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.snapshots:
            raise ValueError("a run needs at least one snapshot")
        ids = self.snapshots[0].node_ids
        for t, g in enumerate(self.snapshots):
            if not np.array_equal(g.node_ids, ids):
                raise ValueError(f"snapshot {t} has a different agent universe")

    @property
    def T(self) -> int:
        return len(self.snapshots)

    def features(self, metric: str, hca: HcaSettings = HcaSettings()) -> list:
        """Per-day descriptor for ``metric``; cached per run."""
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
        key = (metric, hca) if metric == "hca" else metric
        if key not in self._features:
            out = []
            for t, g in enumerate(self.snapshots):
                try:
                    out.append(_describe(g, metric, hca))
                except ValueError as exc:
                    raise DayComparisonError(t, exc) from exc
            self._features[key] = out
        return self._features[key]


def _describe(g: Graph, metric: str, hca: HcaSettings):
    if metric == "degree":
        return degree_distribution(g)
    if metric == "spd":
        return shortest_path_distribution(g)
    if metric == "portrait":
        return network_portrait(g)
    return hca.coefficients(g)


_DAY_DISTANCE = {
    "degree": wasserstein1,
    "spd": wasserstein1,
    "portrait": portrait_divergence,
    "hca": d_hca,
}


def per_day_distances(a: RunSeries, b: RunSeries, metric: str, hca: HcaSettings = HcaSettings()) -> np.ndarray:
    if a.T != b.T:
        raise ValueError(f"runs differ in length: {a.T} vs {b.T}")
    fa = a.features(metric, hca)
    fb = b.features(metric, hca)
    dist = _DAY_DISTANCE[metric]
    out = np.empty(a.T)
    for t, (x, y) in enumerate(zip(fa, fb)):
        try:
            out[t] = dist(x, y)
        except ValueError as exc:
            raise DayComparisonError(t, exc) from exc
    return out


def run_distance(a: RunSeries, b: RunSeries, metric: str, hca: HcaSettings = HcaSettings()) -> float:
    """2-norm over aligned days of the per-day graph distance."""
    return float(np.linalg.norm(per_day_distances(a, b, metric, hca)))


@dataclass
class DistanceMatrix:
    labels: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise ValueError("values must be square and match the labels")

    def to_csv(self) -> str:
        rows = [",".join(self.labels)]
        rows += [",".join(f"{x:.9g}" for x in row) for row in self.values]
        return "\n".join(rows) + "\n"

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "DistanceMatrix":
        lines = Path(path).read_text().splitlines()
        labels = lines[0].split(",")
        values = [[float(x) for x in line.split(",")] for line in lines[1:]]
        return cls(labels, np.array(values))


def worker_count() -> int:
    """Worker cap from ``SOCIONET_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("SOCIONET_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("SOCIONET_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def distance_matrix(runs: list[RunSeries], metric: str, hca: HcaSettings = HcaSettings(),
                    workers: int | None = None) -> DistanceMatrix:
    if len(runs) < 2:
        raise ValueError("need at least two runs")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(lambda r: r.features(metric, hca), runs))
    n = len(runs)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = run_distance(runs[i], runs[j], metric, hca)
    return DistanceMatrix([r.run_id for r in runs], values)


def block_means(matrix: DistanceMatrix, blocks: list[list[int]]) -> tuple[float, float]:
    """Mean off-diagonal distance within blocks and between blocks."""
    member = {}
    for b, idx in enumerate(blocks):
        for i in idx:
            member[i] = b
    within, between = [], []
    keys = sorted(member)
    for x, i in enumerate(keys):
        for j in keys[x + 1 :]:
            (within if member[i] == member[j] else between).append(matrix.values[i, j])
    return (math.fsum(within) / len(within) if within else 0.0,
            math.fsum(between) / len(between) if between else 0.0)
