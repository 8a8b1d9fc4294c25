"""Daily friendship ABM: schedules, venue co-location, strengthening and decay.

One day runs in a fixed order: schedule, venue interactions, update of
friendships that met today, decay of those that did not, befriending from the
interaction hash, then hash hygiene. Every random draw comes from the run's
single generator with agents visited in ascending id and hash entries in
ascending target id, so a (population, scenario, tuning) triple replays
exactly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .compare import RunSeries
from .graph import Graph, WeightedSocialGraph, binarize
from .io import DataError, format_kv, read_kv, write_text
from .popgen import Population

NFI_VALUES = (1, 3, 5, 8)
DECLINE_RATES = (0.025, 0.05, 0.075)
MIN_DECLINE_RATES = (0.05, 0.01)
WAKING_HOURS = 16.0
# positive floor so fresh friendship weights are drawn from the open interval (0, 1)
_TINY = np.nextafter(0.0, 1.0)


@dataclass(frozen=True)
class ScenarioParams:
    scenario_id: int
    nfi: int
    decline: str
    dr: float
    mr: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.decline not in ("linear", "multiplicative"):
            raise ValueError("decline must be 'linear' or 'multiplicative'")
        if (self.mr is None) != (self.decline == "linear"):
            raise ValueError("mr is required for multiplicative decline and only then")
        if self.nfi < 1 or self.dr <= 0:
            raise ValueError("nfi must be >= 1 and dr > 0")

    def decay(self, x: float) -> float:
        if self.decline == "linear":
            return x - self.dr
        return x - self.dr * max(self.mr, 1.0 - x)


def scenario_grid(seed: int = 0) -> list[ScenarioParams]:
    """The 36 parameter combinations, NFI varying fastest, then dr, then decline form."""
    forms = [("linear", None)] + [("multiplicative", mr) for mr in MIN_DECLINE_RATES]
    grid = []
    for decline, mr in forms:
        for dr in DECLINE_RATES:
            for nfi in NFI_VALUES:
                grid.append(ScenarioParams(len(grid) + 1, nfi, decline, dr, mr, seed))
    return grid


@dataclass(frozen=True)
class SimTuning:
    p_pos: float = 0.8
    p_new: float = 0.5
    max_friends: int = 30
    venue_contact_cap: int = 10
    init_friend_mean: float = 5.0
    entertainment_prob: float = 1.0 / 7.0
    group_size: int = 4
    arrival_sd_hours: float = 1.0 / 3.0
    duration_sd_hours: float = 0.5

    def __post_init__(self):
        for name in ("p_pos", "p_new", "entertainment_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("max_friends", "venue_contact_cap", "init_friend_mean", "group_size",
                     "arrival_sd_hours", "duration_sd_hours"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


_SCENARIO_KEYS = ("scenario_id", "nfi", "decline", "dr", "mr", "seed")


def scenario_to_kv(params: ScenarioParams, tuning: SimTuning = SimTuning()) -> dict[str, str]:
    out = {}
    for key, value in asdict(params).items():
        out[key] = "NA" if value is None else repr(value) if isinstance(value, float) else str(value)
    for key, value in asdict(tuning).items():
        out[key] = repr(value) if isinstance(value, float) else str(value)
    return out


def scenario_from_kv(kv: dict[str, str]) -> tuple[ScenarioParams, SimTuning]:
    kv = dict(kv)
    try:
        params = ScenarioParams(
            scenario_id=int(kv.pop("scenario_id")),
            nfi=int(kv.pop("nfi")),
            decline=kv.pop("decline"),
            dr=float(kv.pop("dr")),
            mr=None if kv.get("mr", "NA") == "NA" else float(kv["mr"]),
            seed=int(kv.pop("seed", "0")),
        )
        kv.pop("mr", None)
        types = {f.name: f.type for f in fields(SimTuning)}
        unknown = set(kv) - set(types)
        if unknown:
            raise DataError(f"unknown scenario keys: {sorted(unknown)}")
        tuning = SimTuning(**{k: (int(v) if types[k] == "int" else float(v)) for k, v in kv.items()})
    except KeyError as exc:
        raise DataError(f"scenario file lacks {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DataError(f"bad scenario value: {exc}") from exc
    return params, tuning


def write_scenario(path, params: ScenarioParams, tuning: SimTuning = SimTuning()) -> None:
    write_text(path, format_kv(scenario_to_kv(params, tuning)))


def read_scenario(path) -> tuple[ScenarioParams, SimTuning]:
    return scenario_from_kv(read_kv(path))


def run_rng(params: ScenarioParams) -> np.random.Generator:
    """Per-run generator derived from (scenario_id, seed)."""
    return np.random.default_rng(np.random.SeedSequence([params.seed, params.scenario_id]))


@dataclass
class SimState:
    """Mutable simulation state.

    ``friends[i]`` maps target -> strength of i's outgoing friendships;
    ``contacts[i]`` is i's interaction hash, target -> [cumulative count,
    hours today, met today].
    """

    pop: Population
    day: int
    friends: list[dict[int, float]]
    contacts: list[dict[int, list]]
    rng: np.random.Generator

    def friendships(self) -> WeightedSocialGraph:
        entries = {(i, j): w for i, out in enumerate(self.friends) for j, w in out.items()}
        return WeightedSocialGraph(range(self.pop.size), entries)

    def snapshot(self, threshold: float = 0.3) -> Graph:
        """Same graph as ``binarize(self.friendships(), threshold)``, built directly."""
        if threshold <= 0.0:
            return binarize(self.friendships(), threshold)
        pairs = [(i, j) for i, out in enumerate(self.friends) for j, w in out.items() if w >= threshold]
        return Graph(range(self.pop.size), np.array(pairs, dtype=np.int64))

    def edge_weights(self):
        """(i, j, w) triples in ascending (i, j) order."""
        for i, out in enumerate(self.friends):
            for j in sorted(out):
                yield i, j, out[j]


def init_state(pop: Population, tuning: SimTuning, rng) -> SimState:
    """Random initial friendships: Poisson(init_friend_mean) targets per agent, capped."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    n = pop.size
    members = pop.household_members()
    friends: list[dict[int, float]] = [{} for _ in range(n)]
    everyone = np.arange(n)
    for i in range(n):
        count = int(rng.poisson(tuning.init_friend_mean)) if tuning.init_friend_mean > 0 else 0
        if count == 0:
            continue
        pool = np.setdiff1d(everyone, members[pop.agents[i].household], assume_unique=True)
        count = min(count, tuning.max_friends, len(pool))
        targets = rng.choice(pool, size=count, replace=False)
        weights = rng.uniform(_TINY, 1.0, size=count)
        friends[i] = {int(t): float(w) for t, w in zip(targets, weights)}
    return SimState(pop, 0, friends, [{} for _ in range(n)], rng)


def _schedule(state: SimState, tuning: SimTuning):
    """Presence intervals per venue: venue -> (agents, starts, ends), agents ascending."""
    pop, rng = state.pop, state.rng
    n = pop.size
    start = 9.0 + tuning.arrival_sd_hours * rng.standard_normal(n)
    length = np.maximum(0.0, 8.0 + tuning.duration_sd_hours * rng.standard_normal(n))
    start = start + 12.0 * pop.night
    end = start + length

    visits: dict[int, list[tuple[int, float, float]]] = {}
    for i in range(n):
        visits.setdefault(int(pop.work_venue[i]), []).append((i, start[i], end[i]))

    fun = pop.venues_of("entertainment")
    if fun and tuning.entertainment_prob > 0:
        adults = np.flatnonzero(pop.adult)
        draws = rng.random(len(adults))
        coworkers: dict[int, list[int]] = {}
        for i in adults:
            coworkers.setdefault(int(pop.work_venue[i]), []).append(int(i))
        out = np.zeros(n, dtype=bool)
        for i, u in zip(adults, draws):
            if out[i] or u >= tuning.entertainment_prob:
                continue
            venue = fun[int(rng.integers(len(fun)))]
            pool = [j for j in coworkers[int(pop.work_venue[i])] if j != i and not out[j]]
            k = min(tuning.group_size, len(pool))
            group = [int(i)] + ([int(j) for j in rng.choice(pool, size=k, replace=False)] if k else [])
            for j in group:
                out[j] = True
                visits.setdefault(venue, []).append((j, 19.0, 21.0))

    table = {}
    for venue in sorted(visits):
        rows = sorted(visits[venue])
        table[venue] = (
            np.array([r[0] for r in rows], dtype=np.int64),
            np.array([r[1] for r in rows]),
            np.array([r[2] for r in rows]),
        )
    return table


def _interact(state: SimState, table, tuning: SimTuning) -> None:
    rng, household = state.rng, state.pop.household
    cap = tuning.venue_contact_cap
    for venue, (agents, starts, ends) in table.items():
        if cap == 0 or len(agents) < 2:
            continue
        met: dict[tuple[int, int], float] = {}
        hh = household[agents]
        overlap = np.minimum.outer(ends, ends) - np.maximum.outer(starts, starts)
        ok = (overlap > 0) & (hh[:, None] != hh[None, :])
        np.fill_diagonal(ok, False)
        ids = agents.tolist()
        for x in range(len(agents)):
            cand = np.flatnonzero(ok[x])
            if not len(cand):
                continue
            picks = rng.choice(cand, size=cap, replace=False) if len(cand) > cap else cand
            a, row = ids[x], overlap[x]
            for y in picks.tolist():
                b = ids[y]
                met[(a, b) if a < b else (b, a)] = float(row[y])
        for (a, b) in sorted(met):
            hours = met[(a, b)]
            for u, v in ((a, b), (b, a)):
                entry = state.contacts[u].get(v)
                if entry is None:
                    entry = state.contacts[u][v] = [0, 0.0, False]
                entry[0] += 1
                entry[1] += hours
                entry[2] = True


def step_day(state: SimState, params: ScenarioParams, tuning: SimTuning) -> SimState:
    """Advance ``state`` by one day in place and return it."""
    table = _schedule(state, tuning)
    _interact(state, table, tuning)
    rng = state.rng

    # update friendships that met today; decay the rest (decay draws nothing,
    # so visiting both in one pass keeps the draw order of separate passes)
    for i, out in enumerate(state.friends):
        hash_i = state.contacts[i]
        for j in sorted(out):
            entry = hash_i.get(j)
            if entry is not None and entry[2]:
                delta = entry[1] / WAKING_HOURS
                w = out[j] + delta if rng.random() < tuning.p_pos else out[j] - delta
                out[j] = min(1.0, max(0.0, w))
            else:
                w = params.decay(out[j])
                if w <= 0.0:
                    del out[j]
                else:
                    out[j] = w

    for i, out in enumerate(state.friends):
        if len(out) >= tuning.max_friends:
            continue
        hash_i = state.contacts[i]
        for j in sorted(hash_i):
            if j in out or hash_i[j][0] < params.nfi:
                continue
            if rng.random() < tuning.p_new:
                out[j] = float(rng.uniform(_TINY, 1.0))
                if len(out) >= tuning.max_friends:
                    break

    for i, hash_i in enumerate(state.contacts):
        state.contacts[i] = {j: [e[0], 0.0, False] for j, e in hash_i.items() if e[2]}
    state.day += 1
    return state


def run_scenario(pop: Population, params: ScenarioParams, tuning: SimTuning = SimTuning(),
                 days: int = 180, threshold: float = 0.3, keep_weighted: bool = False,
                 on_day=None) -> RunSeries:
    """Simulate ``days`` days; snapshot t is the binarised graph at the end of day t.

    ``on_day(t, state)`` is called after each day, before the next begins.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    state = init_state(pop, tuning, run_rng(params))
    snapshots, weighted = [], []
    for t in range(days):
        step_day(state, params, tuning)
        snapshots.append(state.snapshot(threshold))
        if keep_weighted:
            weighted.append(state.friendships())
        if on_day is not None:
            on_day(t, state)
    run_id = f"s{params.scenario_id:02d}_seed{params.seed}"
    return RunSeries(run_id, snapshots, weighted if keep_weighted else None)
