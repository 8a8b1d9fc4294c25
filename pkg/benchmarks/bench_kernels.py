"""Time the numba loop kernels against the pure-numpy forms.

    python3 benchmarks/bench_kernels.py [--nodes 2000] [--repeat 5]

Both forms are imported directly, so ``SOCIONET_BACKEND`` only matters for
whether the loop forms are compiled (numba installed) or plain Python.
"""
import argparse
import time

import numpy as np

from socionet import kernels
from socionet._accel import HAVE_NUMBA
from socionet.graph import Graph


def random_csr(n, mean_degree, seed):
    rng = np.random.default_rng(seed)
    m = int(n * mean_degree / 2)
    pairs = rng.integers(0, n, size=(m, 2))
    # a ring keeps every node at degree >= 2 so the walk is well defined
    ring = np.column_stack([np.arange(n), (np.arange(n) + 1) % n])
    g = Graph(range(n), np.vstack([pairs, ring]))
    return g.indptr, g.indices


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=2000)
    parser.add_argument("--degree", type=float, default=12.0)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    indptr, indices = random_csr(args.nodes, args.degree, args.seed)
    deg = np.diff(indptr).astype(np.float64)
    deltas = np.linspace(0.0, 5.0, 21) / args.steps
    cases = [
        ("bfs_shells", (indptr, indices)),
        ("neighbor_links", (indptr, indices)),
        ("lazy_walk", (indptr, indices, deg, deltas, args.steps, False)),
    ]
    label = "numba" if HAVE_NUMBA else "python loops (numba missing)"
    print(f"{args.nodes} nodes, {len(indices) // 2} edges; loop form = {label}")
    print(f"{'kernel':<16}{'loops s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, call_args in cases:
        loops = getattr(kernels, f"{name}_loops")
        vec = getattr(kernels, f"{name}_numpy")
        loops(*call_args)  # compile outside the timing
        t_loop, a = best_of(loops, call_args, args.repeat)
        t_vec, b = best_of(vec, call_args, args.repeat)
        agree = np.array_equal(a, b) if a.dtype.kind == "i" else np.allclose(a, b, rtol=1e-12, atol=0)
        print(f"{name:<16}{t_loop:>10.4f}{t_vec:>10.4f}{t_vec / t_loop:>8.1f}x  {agree}")


if __name__ == "__main__":
    main()
