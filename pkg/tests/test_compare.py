import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs, path3, random_connected_graph, triangle
from socionet.compare import (
    DayComparisonError,
    DistanceMatrix,
    HcaSettings,
    RunSeries,
    block_means,
    distance_matrix,
    per_day_distances,
    portrait_divergence,
    run_distance,
    wasserstein1,
    worker_count,
)
from socionet.graph import Distribution, Graph, network_portrait
from socionet.io import write_plot_data


def brute_force_w1(u, v):
    """Minimum-cost perfect matching between equal-size unit-mass samples."""
    a = [k for k, c in sorted(u.bins.items()) for _ in range(c)]
    b = [k for k, c in sorted(v.bins.items()) for _ in range(c)]
    return min(sum(abs(x - y) for x, y in zip(a, perm)) for perm in itertools.permutations(b)) / len(a)


def unit_masses(max_size=6):
    return st.integers(1, max_size).flatmap(
        lambda n: st.tuples(st.lists(st.integers(0, 8), min_size=n, max_size=n),
                            st.lists(st.integers(0, 8), min_size=n, max_size=n)))


def hist(values):
    d = {}
    for x in values:
        d[x] = d.get(x, 0) + 1
    return Distribution(d)


# -- W1 -----------------------------------------------------------------------

def test_w1_examples():
    u = Distribution({1: 1, 2: 1})
    assert wasserstein1(u, u) == 0
    assert wasserstein1(Distribution({0: 1}), Distribution({3: 1})) == 3
    assert wasserstein1(u, Distribution({3: 1, 4: 1})) == 2


def test_w1_needs_mass():
    with pytest.raises(ValueError):
        wasserstein1(Distribution(), Distribution({1: 1}))


@given(unit_masses())
def test_w1_equals_brute_force_matching(pair):
    u, v = hist(pair[0]), hist(pair[1])
    assert wasserstein1(u, v) == brute_force_w1(u, v)


@given(st.dictionaries(st.integers(0, 20), st.integers(1, 50), min_size=1),
       st.dictionaries(st.integers(0, 20), st.integers(1, 50), min_size=1),
       st.dictionaries(st.integers(0, 20), st.integers(1, 50), min_size=1))
def test_w1_is_a_metric(a, b, c):
    a, b, c = Distribution(a), Distribution(b), Distribution(c)
    assert wasserstein1(a, a) == 0
    assert wasserstein1(a, b) == wasserstein1(b, a)
    assert wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9


def test_w1_normalises_totals():
    assert wasserstein1(Distribution({1: 1}), Distribution({1: 10})) == 0
    assert wasserstein1(Distribution({1: 50, 2: 50}), Distribution({1: 40, 2: 60})) == pytest.approx(0.1)


# -- portrait divergence ---------------------------------------------------

def jsd_by_enumeration(g, h):
    """Dict-based P(k, l) construction and base-2 JSD."""
    def dist(graph):
        b = network_portrait(graph)
        cells = {(l, k): k * b[l, k] for l in range(b.num_rows) for k in range(b.num_cols) if k * b[l, k]}
        tot = sum(cells.values())
        return {c: w / tot for c, w in cells.items()}
    p, q = dist(g), dist(h)
    out = 0.0
    for c in set(p) | set(q):
        m = 0.5 * (p.get(c, 0) + q.get(c, 0))
        for x in (p.get(c, 0), q.get(c, 0)):
            if x:
                out += 0.5 * x * math.log2(x / m)
    return out


def test_portrait_divergence_path_vs_triangle():
    a, b = network_portrait(path3()), network_portrait(triangle())
    assert portrait_divergence(a, a) == 0
    assert portrait_divergence(a, b) == pytest.approx(jsd_by_enumeration(path3(), triangle()), abs=1e-12)
    assert 0 < portrait_divergence(a, b) <= 1


@settings(max_examples=50, deadline=None)
@given(graphs(), graphs())
def test_portrait_divergence_properties(g, h):
    if g.num_edges == 0 or h.num_edges == 0:
        return
    a, b = network_portrait(g), network_portrait(h)
    d = portrait_divergence(a, b)
    assert 0 <= d <= 1
    assert d == portrait_divergence(b, a)
    assert d == pytest.approx(jsd_by_enumeration(g, h), abs=1e-12)


def test_portrait_divergence_needs_mass():
    with pytest.raises(ValueError):
        portrait_divergence(network_portrait(Graph()), network_portrait(triangle()))


@given(graphs(), st.randoms(use_true_random=False))
def test_portrait_divergence_relabel_invariant(g, rnd):
    if g.num_edges == 0:
        return
    ids = [int(x) for x in g.node_ids]
    new = ids[:]
    rnd.shuffle(new)
    h = g.relabel(dict(zip(ids, new)))
    assert portrait_divergence(network_portrait(g), network_portrait(h)) <= 1e-12


# -- runs ------------------------------------------------------------------

def run_of(rng, days=4, n=15, name="r"):
    return RunSeries(name, [random_connected_graph(rng, n, 0.15) for _ in range(days)])


def test_run_distance_two_norm():
    g = Graph(range(4), [(0, 1)])
    a = RunSeries("a", [Graph(range(4), []), g])
    b = RunSeries("b", [Graph(range(4), [(0, 1), (1, 2), (2, 3)]), Graph(range(4), [(0, 1), (2, 3)])])
    per_day = per_day_distances(a, b, "degree")
    assert run_distance(a, b, "degree") == pytest.approx(float(np.linalg.norm(per_day)))


def test_run_distance_of_3_and_4_is_5():
    assert float(np.linalg.norm([3.0, 4.0])) == 5.0


@pytest.mark.parametrize("metric", ["degree", "spd", "portrait", "hca"])
def test_run_vs_itself_is_zero(rng, metric):
    a = run_of(rng, days=2)
    hca = HcaSettings(n_coeffs=5, m=21, mode="exact")
    assert run_distance(a, a, metric, hca) == 0.0


def test_run_errors(rng):
    a, b = run_of(rng, 3), run_of(rng, 2)
    with pytest.raises(ValueError, match="differ in length"):
        run_distance(a, b, "degree")
    with pytest.raises(ValueError):
        run_distance(a, a, "bogus")
    with pytest.raises(ValueError, match="agent universe"):
        RunSeries("x", [Graph(range(3), []), Graph(range(4), [])])


def test_day_index_is_attached(rng):
    good = random_connected_graph(rng, 6, 0.3)
    empty = Graph(range(6), [])
    a = RunSeries("a", [good, good, empty])
    b = RunSeries("b", [good, good, good])
    with pytest.raises(DayComparisonError) as info:
        run_distance(a, b, "spd")
    assert info.value.day == 2


def test_run_distance_pseudometric(rng):
    runs = [run_of(rng, 3, name=f"r{i}") for i in range(4)]
    hca = HcaSettings(n_coeffs=5, m=21, mode="exact")
    for metric in ("degree", "spd", "hca"):
        for a, b, c in itertools.permutations(runs, 3):
            ab, bc, ac = (run_distance(x, y, metric, hca) for x, y in ((a, b), (b, c), (a, c)))
            assert ab == pytest.approx(run_distance(b, a, metric, hca), abs=1e-12)
            assert ac <= ab + bc + 1e-9


def test_distance_matrix_examples(rng):
    a = run_of(rng, name="a")
    b = RunSeries("b", a.snapshots)
    c = run_of(rng, name="c")
    m = distance_matrix([a, b], "degree", workers=1)
    assert np.all(m.values == 0)
    m = distance_matrix([a, b, c], "degree", workers=2)
    assert m.values[0, 1] == 0 < m.values[0, 2] == m.values[1, 2]
    assert np.array_equal(m.values, m.values.T)


def test_distance_matrix_threads_match_serial(rng):
    runs = [run_of(rng, name=f"r{i}") for i in range(4)]
    serial = distance_matrix([RunSeries(r.run_id, r.snapshots) for r in runs], "portrait", workers=1)
    threaded = distance_matrix(runs, "portrait", workers=3)
    assert serial.to_csv() == threaded.to_csv()


def test_matrix_csv_round_trip(tmp_path, rng):
    m = DistanceMatrix(["a", "b"], np.zeros((2, 2)))
    assert m.to_csv() == "a,b\n0,0\n0,0\n"
    runs = [run_of(rng, name=f"r{i}") for i in range(3)]
    m = distance_matrix(runs, "degree", workers=1)
    path = tmp_path / "m.csv"
    write_plot_data(m, path)
    first = path.read_bytes()
    write_plot_data(m, path)
    assert path.read_bytes() == first
    back = DistanceMatrix.read_csv(path)
    np.testing.assert_allclose(back.values, m.values, rtol=1e-8)


def test_block_means():
    v = np.array([[0, 1, 5, 5], [1, 0, 5, 5], [5, 5, 0, 2], [5, 5, 2, 0]], dtype=float)
    assert block_means(DistanceMatrix(list("abcd"), v), [[0, 1], [2, 3]]) == (1.5, 5.0)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SOCIONET_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SOCIONET_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("SOCIONET_THREADS", "-1")
    with pytest.raises(ValueError):
        worker_count()
