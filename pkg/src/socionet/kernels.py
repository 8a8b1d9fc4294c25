"""Hot numeric kernels on CSR adjacency arrays.

Each kernel exists twice: a loop form compiled with numba (``*_loops``) and a
vectorised pure-numpy form (``*_numpy``). The public names dispatch on
:data:`socionet._accel.BACKEND`. Both forms must return identical results;
``tests/test_kernels.py`` checks that and ``benchmarks/bench_kernels.py``
times them.

CSR convention: ``indptr`` has length ``n + 1`` and ``indices[indptr[i]:indptr[i+1]]``
lists the (sorted, duplicate-free) neighbours of position ``i``.
"""
import numpy as np

from ._accel import BACKEND, njit


# ---------------------------------------------------------------------------
# breadth-first shell counts
# ---------------------------------------------------------------------------

@njit
def bfs_shells_loops(indptr, indices):
    n = indptr.shape[0] - 1
    cap = 8
    shells = np.zeros((n, cap), dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    width = 1
    for src in range(n):
        head = 0
        tail = 1
        queue[0] = src
        dist[src] = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= cap:
                grown = np.zeros((n, cap * 2), dtype=np.int64)
                grown[:, :cap] = shells
                shells = grown
                cap *= 2
            shells[src, du] += 1
            if du + 1 > width:
                width = du + 1
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
        for i in range(tail):
            dist[queue[i]] = -1
    return shells[:, :width].copy()


def bfs_shells_numpy(indptr, indices):
    n = len(indptr) - 1
    rows = []
    width = 1
    deg = np.diff(indptr)
    for src in range(n):
        seen = np.zeros(n, dtype=bool)
        seen[src] = True
        frontier = np.array([src], dtype=np.int64)
        counts = [1]
        while True:
            lengths = deg[frontier]
            total = int(lengths.sum())
            if total == 0:
                break
            offsets = np.repeat(indptr[frontier] - np.cumsum(lengths) + lengths, lengths)
            nbrs = indices[offsets + np.arange(total)]
            nbrs = np.unique(nbrs[~seen[nbrs]])
            if nbrs.size == 0:
                break
            seen[nbrs] = True
            counts.append(nbrs.size)
            frontier = nbrs
        rows.append(counts)
        width = max(width, len(counts))
    shells = np.zeros((n, width), dtype=np.int64)
    for src, counts in enumerate(rows):
        shells[src, : len(counts)] = counts
    return shells


# ---------------------------------------------------------------------------
# edges among each node's neighbours (triangles through the node)
# ---------------------------------------------------------------------------

@njit
def neighbor_links_loops(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for u in range(n):
        lo = indptr[u]
        hi = indptr[u + 1]
        if hi - lo < 2:
            continue
        for p in range(lo, hi):
            mark[indices[p]] = True
        links = 0
        for p in range(lo, hi):
            v = indices[p]
            for q in range(indptr[v], indptr[v + 1]):
                w = indices[q]
                if w > v and mark[w]:
                    links += 1
        out[u] = links
        for p in range(lo, hi):
            mark[indices[p]] = False
    return out


def neighbor_links_numpy(indptr, indices, block=2048):
    n = len(indptr) - 1
    out = np.zeros(n, dtype=np.int64)
    if n == 0 or len(indices) == 0:
        return out
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj = np.zeros((n, n), dtype=np.float32)
    adj[rows, indices] = 1.0
    for lo in range(0, n, block):
        part = adj[lo : lo + block]
        # (A^2 ∘ A) row sums count each neighbour link twice
        out[lo : lo + block] = np.rint(((part @ adj) * part).sum(axis=1) / 2).astype(np.int64)
    return out


# ---------------------------------------------------------------------------
# lazy random walk heat content
# ---------------------------------------------------------------------------

@njit
def lazy_walk_loops(indptr, indices, deg, deltas, steps, flip):
    """Heat content from k lazy-walk steps, one value per delta.

    M = deg^-1 A on the interior and M_L = (1 - delta) I + delta M. The
    default orientation sums M_L^k(v, w) sqrt(d_v / d_w); ``flip`` walks with
    the transpose and sums (M_L^T)^k(v, w) sqrt(d_w / d_v). Detailed balance
    makes the two equal.
    """
    n = indptr.shape[0] - 1
    m = deltas.shape[0]
    root = np.sqrt(deg)
    x = np.empty((n, m))
    y = np.empty((n, m))
    for i in range(n):
        start = root[i] if flip else 1.0 / root[i]
        for j in range(m):
            x[i, j] = start
    for _ in range(steps):
        for i in range(n):
            for j in range(m):
                y[i, j] = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                w = indices[p]
                scale = 1.0 / deg[w] if flip else 1.0
                for j in range(m):
                    y[i, j] += scale * x[w, j]
            inv = 1.0 if flip else 1.0 / deg[i]
            for j in range(m):
                d = deltas[j]
                y[i, j] = (1.0 - d) * x[i, j] + d * inv * y[i, j]
        x, y = y, x
    out = np.zeros(m)
    for i in range(n):
        weight = 1.0 / root[i] if flip else root[i]
        for j in range(m):
            out[j] += weight * x[i, j]
    return out


def lazy_walk_numpy(indptr, indices, deg, deltas, steps, flip):
    n = len(indptr) - 1
    deltas = np.asarray(deltas, dtype=np.float64)
    root = np.sqrt(deg)
    start = root if flip else 1.0 / root
    x = np.repeat(start[:, None], len(deltas), axis=1)
    counts = np.diff(indptr)
    nonempty = counts > 0
    starts = np.minimum(indptr[:-1], max(len(indices) - 1, 0))
    keep = 1.0 - deltas[None, :]
    move = deltas[None, :] if flip else deltas[None, :] / deg[:, None]
    for _ in range(steps):
        if len(indices):
            src = x / deg[:, None] if flip else x
            summed = np.add.reduceat(src[indices], starts, axis=0)
            summed[~nonempty] = 0.0
        else:
            summed = np.zeros_like(x)
        x = keep * x + move * summed
    weight = 1.0 / root if flip else root
    return weight @ x


if BACKEND == "numba":
    bfs_shells = bfs_shells_loops
    neighbor_links = neighbor_links_loops
    lazy_walk = lazy_walk_loops
else:
    bfs_shells = bfs_shells_numpy
    neighbor_links = neighbor_links_numpy
    lazy_walk = lazy_walk_numpy
