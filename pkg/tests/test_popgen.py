import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from socionet.graph import Distribution
from socionet.io import DataError
from socionet.popgen import (
    ConfigError,
    PopConfig,
    Population,
    sample_population,
    validate_marginal,
)


def cfg_with(**kw):
    cfg = PopConfig()
    for k, v in kw.items():
        setattr(cfg, k, v)
    return cfg


def test_size_bounds():
    pop = sample_population(cfg_with(num_households=100, household_size_dist={1: 0.5, 2: 0.5}), 3)
    assert 100 <= pop.size <= 200


def test_fixed_size_households():
    pop = sample_population(cfg_with(num_households=10, household_size_dist={3: 1.0}), 0)
    assert pop.size == 30
    assert len(pop.venues_of("home")) == 10
    assert pop.household_sizes() == {3: 10}


def test_determinism_and_text_round_trip(tmp_path):
    cfg = cfg_with(num_households=30)
    a, b = sample_population(cfg, 5), sample_population(cfg, 5)
    assert a.to_text() == b.to_text()
    path = tmp_path / "pop.txt"
    a.write(path)
    back = Population.read(path)
    assert back.to_text() == a.to_text()
    assert back.venues == a.venues
    assert sample_population(cfg, 6).to_text() != a.to_text()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_population_invariants(households, seed):
    pop = sample_population(cfg_with(num_households=households), seed)
    kinds = dict(pop.venues)
    assert [v for v, _ in pop.venues] == list(range(len(pop.venues)))
    assert [a.id for a in pop.agents] == list(range(pop.size))
    members = pop.household_members()
    assert sorted(i for m in members.values() for i in m) == list(range(pop.size))
    for h, ids in members.items():
        assert len({pop.agents[i].home for i in ids}) == 1
        assert pop.agents[ids[0]].adult
    for a in pop.agents:
        assert kinds[a.home] == "home"
        assert kinds[a.mall] == "mall"
        assert kinds[a.venue] == ("workplace" if a.adult else "school")
        assert not (a.night_shift and not a.adult)


def test_uniform_assignment_when_unskewed():
    cfg = cfg_with(num_households=3000, venue_size_skew=0.0,
                   venues={"workplace": 4, "school": 2, "mall": 1, "entertainment": 1})
    pop = sample_population(cfg, 1)
    counts = np.bincount(pop.work_venue[pop.adult])
    counts = counts[counts > 0]
    assert len(counts) == 4
    assert counts.max() / counts.min() < 1.15


def test_skew_orders_venue_sizes():
    cfg = cfg_with(num_households=3000, venue_size_skew=1.0,
                   venues={"workplace": 4, "school": 2, "mall": 1, "entertainment": 1})
    pop = sample_population(cfg, 1)
    first = min(v for v, k in pop.venues if k == "workplace")
    counts = np.bincount(pop.work_venue[pop.adult] - first, minlength=4)[:4]
    assert np.all(np.diff(counts) < 0)
    # weights 1, 1/2, 1/3, 1/4
    np.testing.assert_allclose(counts / counts.sum(), np.array([12, 6, 4, 3]) / 25, atol=0.02)


def test_night_shift_fraction():
    pop = sample_population(cfg_with(num_households=3000, night_shift_fraction=0.25), 2)
    assert pop.night[pop.adult].mean() == pytest.approx(0.25, abs=0.02)


@pytest.mark.parametrize("change", [
    {"household_size_dist": {1: 0.5, 2: 0.6}},
    {"household_size_dist": {0: 1.0}},
    {"num_households": 0},
    {"adult_fraction": 1.5},
    {"venues": {"workplace": 0, "school": 1, "mall": 1, "entertainment": 1}},
    {"venue_size_skew": -1.0},
])
def test_invalid_config(change):
    with pytest.raises(ConfigError):
        sample_population(cfg_with(**change), 0)


def test_config_file_round_trip(tmp_path):
    cfg = cfg_with(num_households=12, household_size_dist={1: 0.25, 4: 0.75})
    path = tmp_path / "pop.cfg"
    cfg.write(path)
    back = PopConfig.read(path)
    assert back == cfg and back.config_hash() == cfg.config_hash()
    path.write_text("num_households = 5\nbogus = 1\n")
    with pytest.raises(ConfigError):
        PopConfig.read(path)
    path.write_text("num_households = five\n")
    with pytest.raises(ConfigError):
        PopConfig.read(path)


def test_malformed_population_file(tmp_path):
    path = tmp_path / "pop.txt"
    path.write_text("# venues home=1 workplace=1\n0 0 1 evening 1 0 0\n")
    with pytest.raises(DataError):
        Population.read(path)
    with pytest.raises(DataError):
        Population.read(tmp_path / "missing.txt")


def test_validate_marginal_examples():
    pop = sample_population(cfg_with(num_households=20, household_size_dist={2: 1.0}), 0)
    assert validate_marginal(pop, pop.household_sizes()) == 0
    assert validate_marginal(pop, Distribution({3: 7})) == 1
    pop = sample_population(cfg_with(num_households=1, household_size_dist={1: 1.0}), 0)
    with pytest.raises(ValueError):
        validate_marginal(pop, Distribution())
    with pytest.raises(ValueError):
        validate_marginal(Population([], []), Distribution({1: 1}))


def test_validate_marginal_derived_value():
    from socionet.compare import wasserstein1
    assert wasserstein1(Distribution({1: 50, 2: 50}), Distribution({1: 40, 2: 60})) == pytest.approx(0.1)
