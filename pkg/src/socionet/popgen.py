"""Desk-scale synthetic population: households, work/school venues, shifts.

Marginals are configured directly instead of being fitted to census tables.
The validation loop (generate, compare the realised household sizes against
a held-out target with W1) is kept.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .compare import wasserstein1
from .graph import Distribution
from .io import DataError, format_kv, parse_kv, read_kv, write_text

VENUE_KINDS = ("home", "workplace", "school", "mall", "entertainment")


class ConfigError(ValueError):
    pass


def _default_sizes():
    return {1: 0.28, 2: 0.34, 3: 0.16, 4: 0.13, 5: 0.06, 6: 0.03}


def _default_venues():
    return {"workplace": 100, "school": 33, "mall": 4, "entertainment": 150}


@dataclass
class PopConfig:
    num_households: int = 410
    household_size_dist: dict[int, float] = field(default_factory=_default_sizes)
    adult_fraction: float = 0.6
    venues: dict[str, int] = field(default_factory=_default_venues)
    night_shift_fraction: float = 0.1
    # venue k of a kind is chosen with weight (k + 1) ** -venue_size_skew
    venue_size_skew: float = 1.0

    def validate(self) -> None:
        if self.num_households < 1:
            raise ConfigError("num_households must be >= 1")
        probs = list(self.household_size_dist.values())
        if not probs or any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise ConfigError("household_size_dist must be a probability vector summing to 1")
        if any(int(k) < 1 for k in self.household_size_dist):
            raise ConfigError("household sizes must be >= 1")
        for name in ("adult_fraction", "night_shift_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if not self.venue_size_skew >= 0.0:
            raise ConfigError("venue_size_skew must be >= 0")
        for kind in ("workplace", "school", "mall", "entertainment"):
            if self.venues.get(kind, 0) < 1:
                raise ConfigError(f"need at least one {kind} venue")
        unknown = set(self.venues) - set(VENUE_KINDS[1:])
        if unknown:
            raise ConfigError(f"unknown venue kinds: {sorted(unknown)}")

    def to_kv(self) -> dict[str, str]:
        sizes = " ".join(f"{k}:{v!r}" for k, v in sorted(self.household_size_dist.items()))
        out = {
            "num_households": str(self.num_households),
            "household_size_dist": sizes,
            "adult_fraction": repr(self.adult_fraction),
            "night_shift_fraction": repr(self.night_shift_fraction),
            "venue_size_skew": repr(self.venue_size_skew),
        }
        for kind in VENUE_KINDS[1:]:
            out[f"venues.{kind}"] = str(self.venues.get(kind, 0))
        return out

    def config_hash(self) -> str:
        return hashlib.sha256(format_kv(self.to_kv()).encode()).hexdigest()[:16]

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "PopConfig":
        cfg = cls()
        try:
            for key, value in kv.items():
                if key == "num_households":
                    cfg.num_households = int(value)
                elif key == "household_size_dist":
                    pairs = (item.split(":") for item in value.replace(",", " ").split())
                    cfg.household_size_dist = {int(k): float(p) for k, p in pairs}
                elif key in ("adult_fraction", "night_shift_fraction", "venue_size_skew"):
                    setattr(cfg, key, float(value))
                elif key.startswith("venues."):
                    cfg.venues = dict(cfg.venues)
                    cfg.venues[key.split(".", 1)[1]] = int(value)
                else:
                    raise ConfigError(f"unknown population config key {key!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad population config value: {exc}") from exc
        cfg.validate()
        return cfg

    @classmethod
    def read(cls, path) -> "PopConfig":
        return cls.from_kv(read_kv(path))

    def write(self, path) -> None:
        write_text(path, format_kv(self.to_kv()))


@dataclass(frozen=True)
class Agent:
    id: int
    household: int
    adult: bool
    venue: int
    night_shift: bool
    home: int
    mall: int


@dataclass
class Population:
    agents: list[Agent]
    venues: list[tuple[int, str]]
    config_hash: str = ""

    def __post_init__(self):
        n = len(self.agents)
        self.household = np.array([a.household for a in self.agents], dtype=np.int64)
        self.work_venue = np.array([a.venue for a in self.agents], dtype=np.int64)
        self.adult = np.array([a.adult for a in self.agents], dtype=bool)
        self.night = np.array([a.night_shift for a in self.agents], dtype=bool)
        if n and not np.array_equal(np.array([a.id for a in self.agents]), np.arange(n)):
            raise ValueError("agent ids must be dense from 0")

    @property
    def size(self) -> int:
        return len(self.agents)

    def venues_of(self, kind: str) -> list[int]:
        return [v for v, k in self.venues if k == kind]

    def household_members(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for a in self.agents:
            out.setdefault(a.household, []).append(a.id)
        return out

    def household_sizes(self) -> Distribution:
        sizes = np.bincount(self.household)
        return Distribution.from_counts(np.bincount(sizes[sizes > 0]))

    # -- text serialisation ------------------------------------------------

    def to_text(self) -> str:
        counts = {k: 0 for k in VENUE_KINDS}
        for _, kind in self.venues:
            counts[kind] += 1
        lines = [
            f"# socionet population config_hash={self.config_hash}",
            "# venues " + " ".join(f"{k}={counts[k]}" for k in VENUE_KINDS),
            "# id household venue shift adult_flag home mall",
        ]
        for a in self.agents:
            shift = "night" if a.night_shift else "day"
            lines.append(f"{a.id} {a.household} {a.venue} {shift} {int(a.adult)} {a.home} {a.mall}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        write_text(path, self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "Population":
        config_hash = ""
        venue_counts = None
        agents = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].split()
                if body[:2] == ["socionet", "population"]:
                    config_hash = dict(p.split("=", 1) for p in body[2:]).get("config_hash", "")
                elif body[:1] == ["venues"]:
                    venue_counts = {k: int(v) for k, v in (p.split("=", 1) for p in body[1:])}
                continue
            parts = line.split()
            if len(parts) != 7 or parts[3] not in ("day", "night"):
                raise DataError(f"population line {lineno}: malformed record {raw!r}")
            i, hh, venue, _, adult, home, mall = (int(x) if k != 3 else x for k, x in enumerate(parts))
            agents.append(Agent(i, hh, bool(adult), venue, parts[3] == "night", home, mall))
        if venue_counts is None:
            raise DataError("population file lacks the '# venues' header")
        venues = []
        for kind in VENUE_KINDS:
            start = len(venues)
            venues += [(start + k, kind) for k in range(venue_counts.get(kind, 0))]
        return cls(agents, venues, config_hash)

    @classmethod
    def read(cls, path) -> "Population":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror}") from exc
        return cls.from_text(text)


def sample_population(cfg: PopConfig, seed: int) -> Population:
    """Draw a population from ``cfg``.

    Venue ids: one home per household first, then workplaces, schools, malls
    and entertainment venues. A single generator seeded with ``seed`` is
    consumed household by household; within a household the draws are size,
    mall, then per member (ascending id) adult flag, venue and shift. The first
    member of every household is an adult. Workplace and school sizes follow
    Zipf weights controlled by ``venue_size_skew`` (0 gives uniform choice).
    """
    cfg.validate()
    rng = np.random.default_rng(seed)
    sizes = np.array(sorted(cfg.household_size_dist), dtype=np.int64)
    probs = np.array([cfg.household_size_dist[k] for k in sizes])
    probs = probs / probs.sum()

    venues: list[tuple[int, str]] = [(h, "home") for h in range(cfg.num_households)]
    first = {}
    for kind in ("workplace", "school", "mall", "entertainment"):
        first[kind] = len(venues)
        venues += [(first[kind] + k, kind) for k in range(cfg.venues[kind])]

    weights = {}
    for kind in ("workplace", "school"):
        w = np.arange(1, cfg.venues[kind] + 1, dtype=np.float64) ** -cfg.venue_size_skew
        weights[kind] = w / w.sum()

    agents = []
    for h in range(cfg.num_households):
        size = int(sizes[rng.choice(len(sizes), p=probs)])
        mall = first["mall"] + int(rng.integers(cfg.venues["mall"]))
        for member in range(size):
            adult = member == 0 or bool(rng.random() < cfg.adult_fraction)
            kind = "workplace" if adult else "school"
            venue = first[kind] + int(rng.choice(cfg.venues[kind], p=weights[kind]))
            night = adult and bool(rng.random() < cfg.night_shift_fraction)
            agents.append(Agent(len(agents), h, adult, venue, night, h, mall))
    return Population(agents, venues, cfg.config_hash())


def validate_marginal(pop: Population, target: Distribution) -> float:
    """W1 between the realised household-size distribution and a held-out target."""
    if pop.size == 0:
        raise ValueError("empty population")
    if not target.total:
        raise ValueError("target distribution has no mass")
    return wasserstein1(pop.household_sizes(), target)
