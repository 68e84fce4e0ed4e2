"""Synthetic league generator with planted role archetypes.

Produces matches in the exact ingest format together with ground-truth
role labels, giving the pipeline a desk-scale oracle. Event counts come
from per-type Poisson draws at archetype rates (jittered per player), with
locations, subtypes, and qualifiers drawn from archetype distributions; no
attempt is made at simulating actual play sequences. Generation is
deterministic: every match derives its own seed from (root seed, match id).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .events import Event, EventType, MatchRecord, PlayerRef, QUALIFIER_INDEX
from .ingest import META_FILENAME, MatchMeta, meta_to_json, serialize_match
from .roles import LabelSet
from .seeding import derive_seed

# Sampling regions: x interval plus a lateral band. Flank points land in
# y <= 21 or y >= 79; central and box points stay inside (21, 79).
REGIONS: dict[str, tuple[tuple[float, float], str]] = {
    "own_box": ((2.0, 16.0), "box"),
    "own_half_central": ((5.0, 49.9), "central"),
    "own_half_flank": ((5.0, 49.9), "flank"),
    "possession_central": ((33.3, 66.6), "central"),
    "possession_flank": ((33.3, 66.6), "flank"),
    "final_third_central": ((66.6, 98.0), "central"),
    "final_third_flank": ((66.6, 98.0), "flank"),
    "opposite_box": ((84.0, 98.0), "box"),
}

_DEFAULT_ZONE_BIAS = {"possession_central": 0.5, "own_half_central": 0.3, "final_third_central": 0.2}

_DEFAULT_SUBTYPES: dict[str, dict[str, float]] = {
    "pass": {"simple": 0.80, "high": 0.07, "head": 0.05, "smart": 0.03, "launch": 0.05},
    "duel": {"defensive": 0.4, "offensive": 0.3, "aerial": 0.2, "loose_ball": 0.1},
    "shot": {"open_play": 0.92, "set_piece": 0.08},
    "save": {"standard": 0.7, "reflex": 0.3},
    "touch": {"reception": 0.55, "dribble": 0.25, "carry": 0.2},
    "foul": {"regular": 0.8, "tactical": 0.2},
}


@dataclass(frozen=True)
class RoleArchetype:
    """Generative profile for one planted role.

    rates are events per 90 minutes by type; hubness multiplies the pass
    and touch rates, standing in for how often the player is a node the
    team's possession flows through.
    """

    role: str
    rates: dict[str, float]
    zone_bias: dict[str, dict[str, float]] = field(default_factory=dict)
    subtype_probs: dict[str, dict[str, float]] = field(default_factory=dict)
    qualifier_probs: dict[str, dict[str, float]] = field(default_factory=dict)
    pass_end_bias: dict[str, float] = field(
        default_factory=lambda: dict(_DEFAULT_ZONE_BIAS)
    )
    hubness: float = 1.0

    def __post_init__(self):
        positive = [r for r in self.rates.values() if r > 0]
        if any(r < 0 for r in self.rates.values()):
            raise ConfigError(f"archetype {self.role}: negative event rate")
        if len(positive) < 2:
            raise ConfigError(f"archetype {self.role}: mixture needs >= 2 active event types")
        if self.hubness <= 0:
            raise ConfigError(f"archetype {self.role}: hubness must be positive")
        for mapping in (self.subtype_probs, self.qualifier_probs):
            for probs in mapping.values():
                for p in probs.values():
                    if not 0.0 <= p <= 1.0:
                        raise ConfigError(f"archetype {self.role}: probability outside [0, 1]")
        for bias in list(self.zone_bias.values()) + [self.pass_end_bias]:
            for region in bias:
                if region not in REGIONS:
                    raise ConfigError(f"archetype {self.role}: unknown region '{region}'")


ARCHETYPES: dict[str, RoleArchetype] = {
    "BWM": RoleArchetype(
        role="BWM",
        rates={"pass": 46.0, "cross": 0.4, "shot": 0.9, "tackle": 3.8,
               "interception": 8.5, "duel": 14.0, "clearance": 1.6,
               "touch": 10.0, "foul": 3.0},
        zone_bias={
            "pass": {"own_half_central": 0.28, "possession_central": 0.52,
                     "possession_flank": 0.08, "final_third_central": 0.12},
            "interception": {"possession_central": 0.58, "own_half_central": 0.30,
                             "possession_flank": 0.06, "own_half_flank": 0.06},
            "tackle": {"possession_central": 0.48, "own_half_central": 0.42,
                       "own_half_flank": 0.10},
            "duel": {"possession_central": 0.50, "own_half_central": 0.30,
                     "possession_flank": 0.10, "final_third_central": 0.10},
            "foul": {"possession_central": 0.60, "own_half_central": 0.25,
                     "final_third_central": 0.15},
            "touch": {"possession_central": 0.60, "own_half_central": 0.25,
                      "final_third_central": 0.15},
            "shot": {"final_third_central": 0.75, "opposite_box": 0.25},
        },
        subtype_probs={
            "duel": {"defensive": 0.62, "offensive": 0.22, "aerial": 0.10, "loose_ball": 0.06},
            "foul": {"regular": 0.50, "tactical": 0.50},
        },
        qualifier_probs={
            "pass": {"accurate": 0.82, "long_ball": 0.10, "through_ball": 0.035,
                     "key_pass": 0.045, "assist": 0.01},
            "duel": {"won": 0.58},
            "shot": {"on_target": 0.30},
            "cross": {"accurate": 0.30},
            "tackle": {"sliding": 0.30},
        },
        pass_end_bias={"possession_central": 0.45, "own_half_central": 0.20,
                       "final_third_central": 0.25, "possession_flank": 0.10},
        hubness=0.95,
    ),
    "HM": RoleArchetype(
        role="HM",
        rates={"pass": 66.0, "cross": 0.15, "shot": 0.6, "tackle": 1.1,
               "interception": 5.0, "duel": 7.0, "clearance": 2.2,
               "touch": 15.0, "foul": 1.1},
        zone_bias={
            "pass": {"own_half_central": 0.44, "possession_central": 0.50,
                     "final_third_central": 0.06},
            "interception": {"own_half_central": 0.52, "possession_central": 0.44,
                             "own_half_flank": 0.04},
            "duel": {"own_half_central": 0.45, "possession_central": 0.45,
                     "final_third_central": 0.10},
            "touch": {"own_half_central": 0.42, "possession_central": 0.52,
                      "final_third_central": 0.06},
            "shot": {"final_third_central": 0.90, "opposite_box": 0.10},
        },
        subtype_probs={
            "duel": {"defensive": 0.56, "offensive": 0.14, "aerial": 0.24, "loose_ball": 0.06},
            "foul": {"regular": 0.75, "tactical": 0.25},
        },
        qualifier_probs={
            "pass": {"accurate": 0.90, "long_ball": 0.07, "through_ball": 0.015,
                     "key_pass": 0.02, "assist": 0.004},
            "duel": {"won": 0.52},
            "shot": {"on_target": 0.30},
            "cross": {"accurate": 0.30},
            "tackle": {"sliding": 0.15},
        },
        pass_end_bias={"own_half_central": 0.30, "possession_central": 0.50,
                       "final_third_central": 0.15, "possession_flank": 0.05},
        hubness=1.3,
    ),
    # Screens in front of the back line, so it keeps moderate ball-winning
    # volume alongside the deep distribution profile.
    "DLP": RoleArchetype(
        role="DLP",
        rates={"pass": 71.0, "cross": 0.25, "shot": 0.9, "tackle": 1.4,
               "interception": 4.8, "duel": 7.5, "clearance": 1.0,
               "touch": 17.0, "foul": 1.0},
        zone_bias={
            "pass": {"own_half_central": 0.42, "possession_central": 0.47,
                     "final_third_central": 0.08, "possession_flank": 0.03},
            "interception": {"own_half_central": 0.50, "possession_central": 0.50},
            "duel": {"own_half_central": 0.40, "possession_central": 0.50,
                     "final_third_central": 0.10},
            "touch": {"own_half_central": 0.35, "possession_central": 0.50,
                      "final_third_central": 0.15},
            "shot": {"final_third_central": 0.85, "opposite_box": 0.15},
        },
        subtype_probs={
            "pass": {"simple": 0.72, "high": 0.09, "head": 0.04, "smart": 0.06, "launch": 0.09},
            "duel": {"defensive": 0.45, "offensive": 0.30, "aerial": 0.10, "loose_ball": 0.15},
            "foul": {"regular": 0.70, "tactical": 0.30},
        },
        qualifier_probs={
            "pass": {"accurate": 0.88, "long_ball": 0.21, "through_ball": 0.04,
                     "key_pass": 0.035, "assist": 0.01},
            "duel": {"won": 0.52},
            "shot": {"on_target": 0.32},
            "cross": {"accurate": 0.35},
            "tackle": {"sliding": 0.10},
        },
        pass_end_bias={"final_third_central": 0.32, "possession_central": 0.38,
                       "own_half_central": 0.12, "final_third_flank": 0.08,
                       "opposite_box": 0.10},
        hubness=1.5,
    ),
    "BTB": RoleArchetype(
        role="BTB",
        rates={"pass": 43.0, "cross": 0.7, "shot": 2.1, "tackle": 2.9,
               "interception": 5.2, "duel": 12.5, "clearance": 1.3,
               "touch": 14.0, "foul": 1.9},
        zone_bias={
            "pass": {"own_half_central": 0.20, "possession_central": 0.45,
                     "final_third_central": 0.30, "possession_flank": 0.05},
            "interception": {"possession_central": 0.52, "own_half_central": 0.36,
                             "final_third_central": 0.12},
            "duel": {"possession_central": 0.42, "final_third_central": 0.25,
                     "own_half_central": 0.23, "possession_flank": 0.10},
            "touch": {"possession_central": 0.38, "final_third_central": 0.32,
                      "opposite_box": 0.18, "own_half_central": 0.12},
            "shot": {"opposite_box": 0.52, "final_third_central": 0.48},
        },
        subtype_probs={
            "duel": {"defensive": 0.42, "offensive": 0.40, "aerial": 0.10, "loose_ball": 0.08},
            "touch": {"reception": 0.40, "dribble": 0.32, "carry": 0.28},
            "foul": {"regular": 0.70, "tactical": 0.30},
        },
        qualifier_probs={
            "pass": {"accurate": 0.80, "long_ball": 0.045, "through_ball": 0.02,
                     "key_pass": 0.028, "assist": 0.008},
            "duel": {"won": 0.54},
            "shot": {"on_target": 0.34},
            "cross": {"accurate": 0.30},
            "tackle": {"sliding": 0.25},
        },
        pass_end_bias={"possession_central": 0.40, "final_third_central": 0.40,
                       "own_half_central": 0.10, "opposite_box": 0.10},
        hubness=1.0,
    ),
    # The advanced playmaker counter-presses high up the pitch, so it keeps
    # real midfield ball-winning volume (interceptions, pressing duels and
    # fouls, all between the boxes) while staying far from the holding
    # profile: no deep presence, no simple-pass volume, extreme creativity.
    "AP": RoleArchetype(
        role="AP",
        rates={"pass": 50.0, "cross": 1.8, "shot": 2.2, "tackle": 1.8,
               "interception": 6.0, "duel": 12.0, "clearance": 0.15,
               "touch": 19.0, "foul": 2.0},
        zone_bias={
            "pass": {"final_third_central": 0.55, "possession_central": 0.38,
                     "final_third_flank": 0.07},
            "interception": {"possession_central": 0.60, "final_third_central": 0.40},
            "tackle": {"possession_central": 0.55, "final_third_central": 0.45},
            "duel": {"final_third_central": 0.45, "possession_central": 0.45,
                     "opposite_box": 0.10},
            "foul": {"possession_central": 0.60, "final_third_central": 0.40},
            "touch": {"final_third_central": 0.55, "opposite_box": 0.25,
                      "possession_central": 0.20},
            "shot": {"final_third_central": 0.60, "opposite_box": 0.40},
        },
        subtype_probs={
            "pass": {"simple": 0.70, "high": 0.06, "head": 0.03, "smart": 0.14, "launch": 0.07},
            "duel": {"defensive": 0.40, "offensive": 0.42, "aerial": 0.05, "loose_ball": 0.13},
            "touch": {"reception": 0.38, "dribble": 0.42, "carry": 0.20},
            "foul": {"regular": 0.50, "tactical": 0.50},
        },
        qualifier_probs={
            "pass": {"accurate": 0.84, "long_ball": 0.05, "through_ball": 0.15,
                     "key_pass": 0.115, "assist": 0.028},
            "duel": {"won": 0.58},
            "shot": {"on_target": 0.36},
            "cross": {"accurate": 0.38},
            "tackle": {"sliding": 0.05},
        },
        pass_end_bias={"final_third_central": 0.45, "opposite_box": 0.28,
                       "possession_central": 0.22, "final_third_flank": 0.05},
        hubness=1.1,
    ),
    "CB": RoleArchetype(
        role="CB",
        rates={"pass": 40.0, "cross": 0.05, "shot": 0.45, "tackle": 2.6,
               "interception": 6.2, "duel": 11.5, "clearance": 5.5,
               "touch": 7.0, "foul": 1.3},
        zone_bias={
            "pass": {"own_half_central": 0.80, "own_half_flank": 0.06,
                     "possession_central": 0.14},
            "interception": {"own_half_central": 0.70, "own_box": 0.20,
                             "possession_central": 0.10},
            "tackle": {"own_half_central": 0.70, "own_box": 0.20, "own_half_flank": 0.10},
            "duel": {"own_half_central": 0.62, "own_box": 0.22, "possession_central": 0.16},
            "clearance": {"own_box": 0.50, "own_half_central": 0.45, "own_half_flank": 0.05},
            "touch": {"own_half_central": 0.85, "possession_central": 0.15},
            "shot": {"opposite_box": 0.70, "final_third_central": 0.30},
        },
        subtype_probs={
            "duel": {"defensive": 0.52, "offensive": 0.06, "aerial": 0.36, "loose_ball": 0.06},
            "shot": {"open_play": 0.40, "set_piece": 0.60},
        },
        qualifier_probs={
            "pass": {"accurate": 0.86, "long_ball": 0.15, "through_ball": 0.004,
                     "key_pass": 0.004},
            "duel": {"won": 0.60},
            "shot": {"on_target": 0.30, "header": 0.55},
            "cross": {"accurate": 0.25},
            "tackle": {"sliding": 0.35},
        },
        pass_end_bias={"own_half_central": 0.45, "possession_central": 0.40,
                       "final_third_central": 0.15},
        hubness=0.8,
    ),
    "AF": RoleArchetype(
        role="AF",
        rates={"pass": 17.0, "cross": 0.5, "shot": 4.3, "tackle": 0.35,
               "interception": 0.6, "duel": 11.5, "clearance": 0.25,
               "touch": 15.0, "foul": 1.4},
        zone_bias={
            "pass": {"final_third_central": 0.60, "opposite_box": 0.25,
                     "possession_central": 0.15},
            "duel": {"final_third_central": 0.50, "opposite_box": 0.30,
                     "possession_central": 0.20},
            "touch": {"opposite_box": 0.40, "final_third_central": 0.45,
                      "possession_central": 0.15},
            "shot": {"opposite_box": 0.62, "final_third_central": 0.38},
        },
        subtype_probs={
            "duel": {"defensive": 0.08, "offensive": 0.56, "aerial": 0.28, "loose_ball": 0.08},
            "touch": {"reception": 0.45, "dribble": 0.32, "carry": 0.23},
        },
        qualifier_probs={
            "pass": {"accurate": 0.72, "long_ball": 0.02, "through_ball": 0.02,
                     "key_pass": 0.04, "assist": 0.015},
            "duel": {"won": 0.50},
            "shot": {"on_target": 0.38, "header": 0.15},
            "cross": {"accurate": 0.28},
            "tackle": {"sliding": 0.20},
        },
        pass_end_bias={"final_third_central": 0.50, "opposite_box": 0.35,
                       "possession_central": 0.15},
        hubness=0.8,
    ),
}

DEFAULT_ROSTER = ("BWM", "HM", "DLP", "BTB", "AP", "CB", "AF")


@dataclass(frozen=True)
class LeagueSpec:
    teams: int = 8
    players_per_team: int = 14
    matches_per_team: int = 10
    label_fraction: float = 0.186
    noise_level: float = 0.15
    rest_probability: float = 0.0
    minutes_per_match: float = 90.0
    competition_id: str = "league-1"
    archetypes: tuple[str, ...] = DEFAULT_ROSTER
    seed: int = 0

    def __post_init__(self):
        if self.teams < 1 or (self.teams > 1 and self.teams % 2 != 0):
            raise ConfigError("teams must be 1 (solo matches) or an even number")
        if self.players_per_team < 11:
            raise ConfigError("players_per_team must be >= 11")
        if self.matches_per_team < 1:
            raise ConfigError("matches_per_team must be >= 1")
        if not 0.0 <= self.label_fraction <= 1.0:
            raise ConfigError("label_fraction must be in [0, 1]")
        if self.noise_level < 0:
            raise ConfigError("noise_level must be non-negative")
        if not 0.0 <= self.rest_probability < 1.0:
            raise ConfigError("rest_probability must be in [0, 1)")
        if not 0.0 < self.minutes_per_match <= 120.0:
            raise ConfigError("minutes_per_match must be in (0, 120]")
        for name in self.archetypes:
            if name not in ARCHETYPES:
                raise ConfigError(f"unknown archetype '{name}'")

    @classmethod
    def from_json(cls, text: str) -> "LeagueSpec":
        import json

        raw = json.loads(text)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown league spec fields: {sorted(unknown)}")
        if "archetypes" in raw:
            raw["archetypes"] = tuple(raw["archetypes"])
        return cls(**raw)


def labeled_count(fraction: float, n_players: int) -> int:
    """Players to label at a given fraction: rounded up to a whole player."""
    return math.ceil(fraction * n_players)


def _sample_point(region: str, rng) -> tuple[float, float]:
    (x_lo, x_hi), lateral = REGIONS[region]
    x = rng.uniform(x_lo, x_hi)
    if lateral == "flank":
        if rng.random() < 0.5:
            y = rng.uniform(1.0, 20.5)
        else:
            y = rng.uniform(79.5, 99.0)
    else:
        y = rng.uniform(22.0, 78.0)
    return round(x, 2), round(y, 2)


def _weighted_choice(weights: dict[str, float], rng) -> str:
    names = sorted(weights)
    total = sum(weights[n] for n in names)
    r = rng.random() * total
    acc = 0.0
    for name in names:
        acc += weights[name]
        if r <= acc:
            return name
    return names[-1]


_Q = QUALIFIER_INDEX


def _draw_qualifiers(etype: str, subtype: str | None, probs: dict[str, float],
                     x: float, y: float, rng) -> int:
    mask = 0
    drawn = {name: rng.random() < p for name, p in sorted(probs.items())}
    for name, hit in drawn.items():
        if hit:
            mask |= 1 << _Q[name]

    if etype == "pass":
        if mask >> _Q["long_ball"] & 1 and mask >> _Q["through_ball"] & 1:
            mask &= ~(1 << _Q["through_ball"])
        if not mask >> _Q["accurate"] & 1:
            mask &= ~(1 << _Q["key_pass"])
        if mask >> _Q["assist"] & 1:
            mask |= (1 << _Q["key_pass"]) | (1 << _Q["accurate"])
    if etype == "shot":
        from .events import zone_of

        if "opposite_box" in zone_of(x, y):
            mask |= 1 << _Q["close_range"]
        if mask >> _Q["goal"] & 1 and not mask >> _Q["on_target"] & 1:
            mask &= ~(1 << _Q["goal"])
    if etype == "duel":
        if subtype != "aerial" and rng.random() < 0.9:
            mask |= 1 << _Q["ground"]
    if etype in ("pass", "shot", "cross"):
        header = subtype == "head" or bool(mask >> _Q["header"] & 1)
        if header:
            mask |= 1 << _Q["header"]
        elif rng.random() < 0.75:
            mask |= 1 << _Q["right_foot"]
        else:
            mask |= 1 << _Q["left_foot"]
    if etype == "save" and "close_range" in probs:
        pass  # already drawn above
    return mask


def _end_point(etype: str, x: float, y: float, end_bias: dict[str, float], rng):
    if etype == "pass":
        return _sample_point(_weighted_choice(end_bias, rng), rng)
    if etype == "cross":
        return _sample_point("opposite_box", rng)
    if etype == "shot":
        return 100.0, round(rng.uniform(44.0, 56.0), 2)
    if etype == "clearance":
        ex = min(100.0, x + rng.uniform(15.0, 40.0))
        return round(ex, 2), round(rng.uniform(1.0, 99.0), 2)
    return None, None


@dataclass(frozen=True)
class _Player:
    player_id: str
    team_id: str
    archetype: RoleArchetype
    rate_jitter: dict[str, float]


def _build_rosters(spec: LeagueSpec) -> list[_Player]:
    players = []
    for t in range(spec.teams):
        team_id = f"T{t:02d}"
        for i in range(spec.players_per_team):
            pid = f"{team_id}P{i:02d}"
            archetype = ARCHETYPES[spec.archetypes[i % len(spec.archetypes)]]
            rng = np.random.default_rng(derive_seed(spec.seed, "player", pid))
            jitter = {
                etype: float(np.exp(spec.noise_level * rng.standard_normal()))
                for etype in sorted(archetype.rates)
            }
            players.append(_Player(pid, team_id, archetype, jitter))
    return players


def _schedule(spec: LeagueSpec) -> list[tuple[int, ...]]:
    """Team index groupings per match; one match per team per round."""
    rng = np.random.default_rng(derive_seed(spec.seed, "schedule"))
    matches = []
    for _ in range(spec.matches_per_team):
        if spec.teams == 1:
            matches.append((0,))
            continue
        order = rng.permutation(spec.teams)
        for k in range(0, spec.teams, 2):
            matches.append((int(order[k]), int(order[k + 1])))
    return matches


def _generate_match(
    match_id: str, spec: LeagueSpec, rosters: dict[str, list[_Player]], team_ids, rng
) -> tuple[MatchRecord, MatchMeta]:
    minutes: dict[str, float] = {}
    events: list[Event] = []
    for team_id in team_ids:
        for player in rosters[team_id]:
            if spec.rest_probability and rng.random() < spec.rest_probability:
                continue
            minutes[player.player_id] = spec.minutes_per_match
            arch = player.archetype
            ref = PlayerRef(player.player_id, player.team_id)
            for etype in sorted(arch.rates):
                rate = arch.rates[etype] * player.rate_jitter[etype]
                if etype in ("pass", "touch"):
                    rate *= arch.hubness
                lam = rate * spec.minutes_per_match / 90.0
                if lam <= 0:
                    continue
                for _ in range(int(rng.poisson(lam))):
                    region = _weighted_choice(
                        arch.zone_bias.get(etype, _DEFAULT_ZONE_BIAS), rng
                    )
                    x, y = _sample_point(region, rng)
                    sub_probs = arch.subtype_probs.get(etype) or _DEFAULT_SUBTYPES.get(etype)
                    subtype = _weighted_choice(sub_probs, rng) if sub_probs else None
                    mask = _draw_qualifiers(
                        etype, subtype, arch.qualifier_probs.get(etype, {}), x, y, rng
                    )
                    end_x, end_y = _end_point(etype, x, y, arch.pass_end_bias, rng)
                    events.append(
                        Event(
                            match_id=match_id,
                            player=ref,
                            event_type=EventType(etype),
                            subtype=subtype,
                            qualifiers=mask,
                            x=x,
                            y=y,
                            end_x=end_x,
                            end_y=end_y,
                            minute=round(rng.uniform(0.0, spec.minutes_per_match), 3),
                        )
                    )
    events.sort(key=lambda ev: ev.minute)
    record = MatchRecord(
        match_id=match_id,
        competition_id=spec.competition_id,
        events=tuple(events),
        minutes=minutes,
    )
    meta = MatchMeta(match_id, spec.competition_id, minutes)
    return record, meta


def generate_league(spec: LeagueSpec) -> tuple[list[MatchRecord], LabelSet]:
    """Generate all matches plus the full ground-truth label set."""
    players = _build_rosters(spec)
    rosters: dict[str, list[_Player]] = {}
    for p in players:
        rosters.setdefault(p.team_id, []).append(p)
    team_ids = sorted(rosters)

    matches = []
    for idx, pairing in enumerate(_schedule(spec)):
        match_id = f"M{idx:04d}"
        rng = np.random.default_rng(derive_seed(spec.seed, "match", match_id))
        record, _ = _generate_match(
            match_id, spec, rosters, [team_ids[t] for t in pairing], rng
        )
        matches.append(record)

    truth = LabelSet(
        assignments={p.player_id: p.archetype.role for p in players},
        provenance="synthetic",
    )
    return matches, truth


def sample_labels(truth: LabelSet, fraction: float, seed: int) -> LabelSet:
    """Uniform seeded sample of the truth, mimicking a partially labeled corpus."""
    ids = sorted(truth.assignments)
    n = labeled_count(fraction, len(ids))
    rng = np.random.default_rng(derive_seed(seed, "labels"))
    chosen = rng.choice(np.array(ids), size=n, replace=False)
    return LabelSet(
        assignments={pid: truth.assignments[pid] for pid in sorted(chosen)},
        provenance="synthetic",
    )


def write_league(
    matches: list[MatchRecord], truth: LabelSet, labels: LabelSet, directory: str | Path
) -> None:
    """Emit the ingest-format files plus truth and training-label CSVs."""
    from .roles import save_labels

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    metas = {}
    for record in matches:
        (directory / f"{record.match_id}.jsonl").write_text(
            serialize_match(record), encoding="utf-8"
        )
        metas[record.match_id] = MatchMeta(
            record.match_id, record.competition_id, record.minutes
        )
    (directory / META_FILENAME).write_text(meta_to_json(metas), encoding="utf-8")
    save_labels(truth, directory / "truth.csv")
    save_labels(labels, directory / "labels.csv")
