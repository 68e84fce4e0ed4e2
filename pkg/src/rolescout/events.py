"""Canonical event-data schema: typed match events, qualifier manifest, pitch zones.

Coordinates are normalized to [0, 100] x [0, 100] with x increasing toward
the opponent goal and y running laterally (0 = left touchline as the team
attacks). The provider feed's own convention must be mapped to this one
before ingest; see docs/format.md.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class EventType(str, Enum):
    PASS = "pass"
    SHOT = "shot"
    CROSS = "cross"
    TACKLE = "tackle"
    INTERCEPTION = "interception"
    DUEL = "duel"
    SAVE = "save"
    CLEARANCE = "clearance"
    TOUCH = "touch"
    FOUL = "foul"
    OTHER = "other"


# Event types that carry an end location.
DIRECTIONAL_TYPES = frozenset(
    {EventType.PASS, EventType.CROSS, EventType.CLEARANCE, EventType.SHOT}
)

# Allowed subtype refinements per event type; types not listed take none.
SUBTYPES: dict[EventType, frozenset[str]] = {
    EventType.PASS: frozenset({"simple", "high", "head", "smart", "hand", "launch"}),
    EventType.DUEL: frozenset({"defensive", "offensive", "aerial", "loose_ball"}),
    EventType.SHOT: frozenset({"open_play", "set_piece"}),
    EventType.SAVE: frozenset({"standard", "reflex"}),
    EventType.TOUCH: frozenset({"reception", "dribble", "carry"}),
    EventType.FOUL: frozenset({"regular", "tactical"}),
}

N_QUALIFIERS = 59

# Positional qualifier manifest. The feed carries a fixed-order vector of 59
# booleans; slot meanings are fixed here and in docs/format.md. Unnamed slots
# are reserved for provider extensions.
QUALIFIER_NAMES: tuple[str, ...] = (
    "accurate",        # 0
    "won",             # 1  (duels)
    "left_foot",       # 2
    "right_foot",      # 3
    "header",          # 4
    "long_ball",       # 5
    "through_ball",    # 6
    "key_pass",        # 7
    "assist",          # 8
    "opportunity",     # 9
    "close_range",     # 10
    "on_target",       # 11
    "goal",            # 12
    "counter_attack",  # 13
    "under_pressure",  # 14
    "progressive",     # 15
    "switch_of_play",  # 16
    "low",             # 17
    "high",            # 18
    "sliding",         # 19
    "ground",          # 20
    "penalty",         # 21
    "free_kick",       # 22
    "corner",          # 23
    "first_touch",     # 24
    "dangerous",       # 25
) + tuple(f"reserved_{i}" for i in range(26, N_QUALIFIERS))

QUALIFIER_INDEX: dict[str, int] = {name: i for i, name in enumerate(QUALIFIER_NAMES)}


def qualifier_mask(names) -> int:
    """Pack qualifier names into the 59-bit mask used by Event.qualifiers."""
    mask = 0
    for name in names:
        mask |= 1 << QUALIFIER_INDEX[name]
    return mask


def pack_qualifiers(flags) -> int:
    bits = 0
    for i, v in enumerate(flags):
        if v:
            bits |= 1 << i
    return bits


def unpack_qualifiers(mask: int) -> list[bool]:
    return [bool(mask >> i & 1) for i in range(N_QUALIFIERS)]


# Zone boundary table (normalized pitch). This is the single source for
# code, tests, and docs/format.md. own_half is strict (x < 50) so the
# halfway line belongs to the attacking half; lateral bands partition the
# pitch into flank_left / central / flank_right exactly once.
ZONE_BOUNDS = {
    "own_half_max_x": 50.0,
    "possession_zone_x": (33.3, 66.6),
    "final_third_min_x": 66.6,
    "opposite_box_min_x": 84.0,
    "opposite_box_y": (21.0, 79.0),
    "flank_left_max_y": 21.0,
    "flank_right_min_y": 79.0,
}

ZONE_TAGS = frozenset(
    {
        "own_half",
        "possession_zone",
        "final_third",
        "opposite_box",
        "flank",
        "flank_left",
        "flank_right",
        "central",
    }
)


def zone_of(x: float, y: float) -> frozenset[str]:
    """Zone tags for a pitch point. Zones overlap except the lateral bands."""
    tags = []
    if x < ZONE_BOUNDS["own_half_max_x"]:
        tags.append("own_half")
    lo, hi = ZONE_BOUNDS["possession_zone_x"]
    if lo <= x <= hi:
        tags.append("possession_zone")
    if x >= ZONE_BOUNDS["final_third_min_x"]:
        tags.append("final_third")
    by_lo, by_hi = ZONE_BOUNDS["opposite_box_y"]
    if x >= ZONE_BOUNDS["opposite_box_min_x"] and by_lo <= y <= by_hi:
        tags.append("opposite_box")
    if y <= ZONE_BOUNDS["flank_left_max_y"]:
        tags.append("flank_left")
        tags.append("flank")
    elif y >= ZONE_BOUNDS["flank_right_min_y"]:
        tags.append("flank_right")
        tags.append("flank")
    else:
        tags.append("central")
    return frozenset(tags)


def _check_coord(x: float, y: float, what: str) -> None:
    if not (0.0 <= x <= 100.0 and 0.0 <= y <= 100.0):
        raise ValueError(f"{what} ({x}, {y}) outside [0, 100] x [0, 100]")


@dataclass(frozen=True, slots=True)
class PlayerRef:
    player_id: str
    team_id: str

    def __post_init__(self):
        if not self.player_id or not self.team_id:
            raise ValueError("player_id and team_id must be non-empty")


@dataclass(frozen=True, slots=True)
class Event:
    """One on-the-ball action.

    qualifiers is the 59-slot boolean vector packed into an int bitmask;
    bit i corresponds to QUALIFIER_NAMES[i].
    """

    match_id: str
    player: PlayerRef
    event_type: EventType
    subtype: str | None
    qualifiers: int
    x: float
    y: float
    end_x: float | None
    end_y: float | None
    minute: float

    def __post_init__(self):
        _check_coord(self.x, self.y, "start location")
        if (self.end_x is None) != (self.end_y is None):
            raise ValueError("end_x and end_y must be given together")
        if self.end_x is not None:
            if self.event_type not in DIRECTIONAL_TYPES:
                raise ValueError(
                    f"end location not allowed for event type '{self.event_type.value}'"
                )
            _check_coord(self.end_x, self.end_y, "end location")
        if self.subtype is not None:
            allowed = SUBTYPES.get(self.event_type, frozenset())
            if self.subtype not in allowed:
                raise ValueError(
                    f"unknown subtype '{self.subtype}' for event type "
                    f"'{self.event_type.value}'"
                )
        if self.minute < 0:
            raise ValueError("minute must be non-negative")
        if not 0 <= self.qualifiers < (1 << N_QUALIFIERS):
            raise ValueError("qualifier mask out of range")

    def has(self, qualifier: str) -> bool:
        return bool(self.qualifiers >> QUALIFIER_INDEX[qualifier] & 1)

    def qualifier_vector(self) -> list[bool]:
        return unpack_qualifiers(self.qualifiers)

    @property
    def zones(self) -> frozenset[str]:
        return zone_of(self.x, self.y)

    @property
    def end_zones(self) -> frozenset[str]:
        if self.end_x is None:
            return frozenset()
        return zone_of(self.end_x, self.end_y)


@dataclass(frozen=True, slots=True)
class MatchRecord:
    """A parsed match: ordered events plus per-player minutes.

    Immutable after construction; safe to share across workers. Events are
    ordered by minute with ties keeping input order.
    """

    match_id: str
    competition_id: str
    events: tuple[Event, ...]
    minutes: dict[str, float] = field(hash=False)

    def __post_init__(self):
        last = -1.0
        for ev in self.events:
            if ev.minute < last:
                raise ValueError("events not ordered by minute")
            last = ev.minute
            if ev.player.player_id not in self.minutes:
                raise ValueError(
                    f"player {ev.player.player_id} missing from minutes map"
                )

    def players(self) -> list[PlayerRef]:
        seen: dict[str, PlayerRef] = {}
        for ev in self.events:
            seen.setdefault(ev.player.player_id, ev.player)
        return list(seen.values())
