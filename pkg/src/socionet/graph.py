"""Static graphs, weighted friendship maps and their descriptors."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import kernels


class Graph:
    """Undirected simple graph over nonnegative integer node ids.

    Stored as CSR over node *positions* (index into ``node_ids``). Instances are
    treated as immutable; the arrays are flagged read-only.
    """

    __slots__ = ("node_ids", "indptr", "indices", "_shells")

    def __init__(self, nodes: Iterable[int] = (), edges=()):
        if isinstance(edges, np.ndarray):
            pairs = edges.reshape(-1, 2).astype(np.int64)
        else:
            pairs = np.array([(int(u), int(v)) for u, v in edges], dtype=np.int64).reshape(-1, 2)
        node_arr = np.fromiter((int(x) for x in nodes), dtype=np.int64)
        node_ids = np.unique(np.concatenate([node_arr, pairs.ravel()]))
        if len(node_ids) and node_ids[0] < 0:
            raise ValueError("node ids must be nonnegative")
        n = len(node_ids)
        pairs = np.searchsorted(node_ids, pairs)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        keys = np.unique(lo * max(n, 1) + hi)
        lo, hi = keys // max(n, 1), keys % max(n, 1)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        self._set(node_ids, indptr, dst[order], None)

    def _set(self, node_ids, indptr, indices, pos):
        for a in (node_ids, indptr, indices):
            a.setflags(write=False)
        self.node_ids = node_ids
        self.indptr = indptr
        self.indices = indices
        self._shells = None

    @classmethod
    def from_csr(cls, node_ids, indptr, indices) -> "Graph":
        g = cls.__new__(cls)
        node_ids = np.asarray(node_ids, dtype=np.int64).copy()
        g._set(
            node_ids,
            np.asarray(indptr, dtype=np.int64).copy(),
            np.asarray(indices, dtype=np.int64).copy(),
            None,
        )
        return g

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def position(self, node: int) -> int:
        i = int(np.searchsorted(self.node_ids, node))
        if i == len(self.node_ids) or self.node_ids[i] != node:
            raise KeyError(node)
        return i

    def neighbors(self, node: int) -> list[int]:
        i = self.position(node)
        return [int(x) for x in self.node_ids[self.indices[self.indptr[i] : self.indptr[i + 1]]]]

    def degree(self, node: int) -> int:
        i = self.position(node)
        return int(self.indptr[i + 1] - self.indptr[i])

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.num_nodes):
            u = int(self.node_ids[i])
            for j in self.indices[self.indptr[i] : self.indptr[i + 1]]:
                if j > i:
                    out.append((u, int(self.node_ids[j])))
        return out

    def relabel(self, mapping: Mapping[int, int]) -> "Graph":
        nodes = [mapping[int(x)] for x in self.node_ids]
        return Graph(nodes, [(mapping[u], mapping[v]) for u, v in self.edges()])

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        keep = set(int(x) for x in nodes)
        return Graph(keep, [(u, v) for u, v in self.edges() if u in keep and v in keep])

    def component_labels(self) -> np.ndarray:
        """Component index per node position, numbered in order of lowest position."""
        n = self.num_nodes
        labels = np.full(n, -1, dtype=np.int64)
        current = 0
        for s in range(n):
            if labels[s] >= 0:
                continue
            labels[s] = current
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.indices[self.indptr[u] : self.indptr[u + 1]]:
                    if labels[v] < 0:
                        labels[v] = current
                        stack.append(v)
            current += 1
        return labels

    def shells(self) -> np.ndarray:
        """``shells[i, l]`` = number of nodes at distance ``l`` from position ``i``."""
        if self._shells is None:
            if self.num_nodes == 0:
                self._shells = np.zeros((0, 1), dtype=np.int64)
            else:
                self._shells = kernels.bfs_shells(self.indptr, self.indices)
            self._shells.setflags(write=False)
        return self._shells

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.node_ids, other.node_ids)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.node_ids.tobytes(), self.indices.tobytes()))

    def __repr__(self):
        return f"Graph(nodes={self.num_nodes}, edges={self.num_edges})"


@dataclass
class WeightedSocialGraph:
    """Directed friendship strengths ``entries[(i, j)]`` in [0, 1] over a set of agents."""

    agents: tuple[int, ...] = ()
    entries: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        self.agents = tuple(sorted(set(int(a) for a in self.agents)))
        for (i, j), w in self.entries.items():
            if i == j:
                raise ValueError(f"self friendship on agent {i}")
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"strength {w} for ({i}, {j}) outside [0, 1]")

    def get(self, i: int, j: int) -> float:
        return self.entries.get((i, j), 0.0)


def binarize(w: WeightedSocialGraph, threshold: float = 0.3) -> Graph:
    """Undirected edge {i, j} iff max(alpha_ij, alpha_ji) >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if threshold == 0.0:
        # absent pairs carry strength 0, which meets a zero threshold
        ids = sorted(set(w.agents).union(*w.entries))
        u, v = np.triu_indices(len(ids), 1)
        ids = np.array(ids, dtype=np.int64)
        return Graph(ids, np.column_stack([ids[u], ids[v]]))
    edges = np.array([pair for pair, a in w.entries.items() if a >= threshold], dtype=np.int64)
    return Graph(w.agents, edges)


class Distribution:
    """Histogram over nonnegative integer values."""

    __slots__ = ("bins",)

    def __init__(self, bins: Mapping[int, float] | None = None):
        clean = {}
        for k, c in (bins or {}).items():
            if k < 0 or c < 0:
                raise ValueError("distribution values and counts must be nonnegative")
            if c:
                clean[int(k)] = c
        self.bins = dict(sorted(clean.items()))

    @classmethod
    def from_counts(cls, counts) -> "Distribution":
        """Build from an array where ``counts[v]`` is the count of value ``v``."""
        return cls({v: int(c) for v, c in enumerate(np.asarray(counts).tolist()) if c})

    @property
    def total(self):
        return sum(self.bins.values())

    def mean(self) -> float:
        t = self.total
        return sum(k * c for k, c in self.bins.items()) / t if t else 0.0

    def variance(self) -> float:
        t = self.total
        if not t:
            return 0.0
        mu = self.mean()
        return sum(c * (k - mu) ** 2 for k, c in self.bins.items()) / t

    def __eq__(self, other):
        if isinstance(other, Distribution):
            return self.bins == other.bins
        if isinstance(other, Mapping):
            return self.bins == {k: c for k, c in other.items() if c}
        return NotImplemented

    def __repr__(self):
        return f"Distribution({self.bins})"


class Portrait:
    """Network portrait: ``rows[l, k]`` nodes with exactly ``k`` nodes at distance ``l``."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = np.asarray(rows, dtype=np.int64)

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def num_cols(self) -> int:
        return self.rows.shape[1]

    def __getitem__(self, idx):
        l, k = idx
        if l >= self.num_rows or k >= self.num_cols:
            return 0
        return int(self.rows[l, k])

    def __eq__(self, other):
        return isinstance(other, Portrait) and np.array_equal(self.rows, other.rows)

    def __repr__(self):
        return f"Portrait(shape={self.rows.shape})"


def basic_stats(g: Graph) -> tuple[int, int, int]:
    """(active nodes, edges, components among active nodes)."""
    deg = g.degrees()
    active = int(np.count_nonzero(deg))
    if not active:
        return 0, 0, 0
    labels = g.component_labels()
    components = len(np.unique(labels[deg > 0]))
    return active, g.num_edges, components


def degree_distribution(g: Graph) -> Distribution:
    return Distribution.from_counts(np.bincount(g.degrees())) if g.num_nodes else Distribution()


def clustering_stats(g: Graph) -> tuple[dict[int, float], float, int]:
    """Local clustering per node, the mean over active nodes and the nonzero count.

    Nodes of degree below two get coefficient 0.
    """
    deg = g.degrees()
    if g.num_nodes == 0:
        return {}, 0.0, 0
    links = kernels.neighbor_links(g.indptr, g.indices)
    coeff = np.zeros(g.num_nodes)
    ok = deg >= 2
    coeff[ok] = links[ok] / (deg[ok] * (deg[ok] - 1) / 2.0)
    per_node = {int(u): float(c) for u, c in zip(g.node_ids, coeff)}
    active = deg > 0
    average = float(coeff[active].mean()) if active.any() else 0.0
    return per_node, average, int(np.count_nonzero(coeff))


def shortest_path_distribution(g: Graph) -> Distribution:
    """Unordered pairs at each finite distance >= 1; unreachable pairs are dropped."""
    shells = g.shells()
    if shells.shape[1] < 2:
        return Distribution()
    ordered = shells[:, 1:].sum(axis=0)
    return Distribution({l + 1: int(c) // 2 for l, c in enumerate(ordered.tolist()) if c})


def network_portrait(g: Graph) -> Portrait:
    shells = g.shells()
    n = g.num_nodes
    if n == 0:
        return Portrait(np.zeros((1, 2), dtype=np.int64))
    width = shells.shape[1]
    kmax = int(shells.max())
    rows = np.zeros((width, max(kmax, 1) + 1), dtype=np.int64)
    for l in range(width):
        rows[l] = np.bincount(shells[:, l], minlength=rows.shape[1])
    return Portrait(rows)


# ---------------------------------------------------------------------------
# edge-list text format
# ---------------------------------------------------------------------------

def parse_edgelist(text: str, nodes: Iterable[int] = ()) -> Graph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(nodes, edges)


def read_edgelist(path, nodes: Iterable[int] = ()) -> Graph:
    return parse_edgelist(Path(path).read_text(), nodes)


def format_edgelist(g: Graph, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def write_edgelist(g: Graph, path, header: str | None = None) -> None:
    Path(path).write_text(format_edgelist(g, header))
