"""Per-player feature engineering from parsed matches.

Pipeline: registry-driven statistic aggregation, dual normalization (per
player action and per team action), team-context metrics from the passing
network, standardization with clipping to [-2, 2], and key features built
as weighted means of standardized columns. Aggregation is a commutative
sum over matches; all outputs are immutable snapshots.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import networkx as nx
import numpy as np

from .errors import ConfigError, ValidationError
from .events import (
    Event,
    EventType,
    MatchRecord,
    QUALIFIER_INDEX,
    ZONE_TAGS,
    qualifier_mask,
)

CLIP_SIGMA = 2.0

META_COLUMNS = (
    "player_id",
    "team_id",
    "competition_id",
    "minutes_played",
    "player_actions",
    "team_actions",
)

PER_PLAYER_SUFFIX = "_per_player_action"
PER_TEAM_SUFFIX = "_per_team_action"

TEAM_METRIC_COLUMNS = (
    "pass_out_degree_share",
    "pass_in_degree_share",
    "pass_betweenness",
    "pass_closeness",
    "defensive_presence",
    "wide_contribution",
)

_VALUE_KINDS = {"count", "qualifier_weighted", "shot_quality"}

# Goal mouth on the normalized pitch: posts 7.32 m apart on a 68 m line.
_GOAL_Y = (50.0 - 7.32 / 68.0 * 50.0, 50.0 + 7.32 / 68.0 * 50.0)


def default_shot_quality(event: Event) -> float:
    """Stand-in shot quality: logistic in distance and goal-mouth angle.

    Not a calibrated expected-goals model; replace via the quality_fn hook
    when a real one is available.
    """
    dx = 100.0 - event.x
    dist = math.hypot(dx, 50.0 - event.y)
    if dx <= 0.0:
        angle = math.pi if _GOAL_Y[0] <= event.y <= _GOAL_Y[1] else 0.0
    else:
        angle = abs(
            math.atan2(_GOAL_Y[1] - event.y, dx) - math.atan2(_GOAL_Y[0] - event.y, dx)
        )
    z = -1.3 - 0.11 * dist + 2.0 * angle
    return 1.0 / (1.0 + math.exp(-z))


@dataclass(frozen=True)
class StatDefinition:
    """One declarative statistic: an event filter plus a value kind.

    Zone filters use any-of semantics over the event's start (or end) zone
    tags; empty means anywhere. Qualifier requirements are all-of, and
    exclusions are none-of.
    """

    name: str
    event_types: frozenset[EventType]
    subtypes: frozenset[str] = frozenset()
    require_qualifiers: int = 0
    exclude_qualifiers: int = 0
    zones: frozenset[str] = frozenset()
    end_zones: frozenset[str] = frozenset()
    value: str = "count"
    weights: tuple[tuple[int, float], ...] = ()

    def matches(self, event: Event) -> bool:
        if event.event_type not in self.event_types:
            return False
        if self.subtypes and event.subtype not in self.subtypes:
            return False
        q = event.qualifiers
        if q & self.require_qualifiers != self.require_qualifiers:
            return False
        if q & self.exclude_qualifiers:
            return False
        if self.zones and not (self.zones & event.zones):
            return False
        if self.end_zones:
            if event.end_x is None or not (self.end_zones & event.end_zones):
                return False
        return True

    def value_of(self, event: Event, quality_fn: Callable[[Event], float]) -> float:
        if self.value == "count":
            return 1.0
        if self.value == "qualifier_weighted":
            total = 0.0
            for bit, weight in self.weights:
                if event.qualifiers >> bit & 1:
                    total += weight
            return total
        return quality_fn(event)


def _reserved_name(name: str) -> bool:
    return (
        name.endswith(PER_PLAYER_SUFFIX)
        or name.endswith(PER_TEAM_SUFFIX)
        or name in TEAM_METRIC_COLUMNS
        or name in META_COLUMNS
    )


def parse_registry(entries: list[dict]) -> list[StatDefinition]:
    if not entries:
        raise ConfigError("statistic registry is empty")
    seen: set[str] = set()
    out = []
    for i, raw in enumerate(entries):
        name = raw.get("name")
        if not name or not isinstance(name, str):
            raise ConfigError(f"registry entry {i} has no name")
        if name in seen:
            raise ConfigError(f"duplicate statistic name '{name}'")
        if _reserved_name(name):
            raise ConfigError(f"statistic name '{name}' collides with a reserved column")
        seen.add(name)
        try:
            types = frozenset(EventType(t) for t in raw["event_types"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"statistic '{name}': bad event_types ({exc})") from exc
        for zone_key in ("zones", "end_zones"):
            for tag in raw.get(zone_key, []):
                if tag not in ZONE_TAGS:
                    raise ConfigError(f"statistic '{name}': unknown zone '{tag}'")
        for qual_key in ("require_qualifiers", "exclude_qualifiers"):
            for qual in raw.get(qual_key, []):
                if qual not in QUALIFIER_INDEX:
                    raise ConfigError(f"statistic '{name}': unknown qualifier '{qual}'")
        value = raw.get("value", "count")
        if value not in _VALUE_KINDS:
            raise ConfigError(f"statistic '{name}': unknown value kind '{value}'")
        weights: tuple[tuple[int, float], ...] = ()
        if value == "qualifier_weighted":
            wmap = raw.get("weights")
            if not wmap:
                raise ConfigError(f"statistic '{name}': qualifier_weighted needs weights")
            for qual in wmap:
                if qual not in QUALIFIER_INDEX:
                    raise ConfigError(f"statistic '{name}': unknown qualifier '{qual}'")
            weights = tuple(
                (QUALIFIER_INDEX[q], float(w)) for q, w in sorted(wmap.items())
            )
        out.append(
            StatDefinition(
                name=name,
                event_types=types,
                subtypes=frozenset(raw.get("subtypes", [])),
                require_qualifiers=qualifier_mask(raw.get("require_qualifiers", [])),
                exclude_qualifiers=qualifier_mask(raw.get("exclude_qualifiers", [])),
                zones=frozenset(raw.get("zones", [])),
                end_zones=frozenset(raw.get("end_zones", [])),
                value=value,
                weights=weights,
            )
        )
    return out


def load_registry(path: str | Path | None = None) -> list[StatDefinition]:
    """Load a statistic registry; None loads the shipped default."""
    if path is None:
        from importlib.resources import files

        text = files("rolescout.data").joinpath("registry.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"registry is not valid JSON: {exc}") from exc
    return parse_registry(entries)


@dataclass(frozen=True)
class KeyFeatureSpec:
    """One key feature: a weighted mean of standardized input columns."""

    name: str
    inputs: tuple[tuple[str, float], ...]


def parse_combos(entries: list[dict]) -> list[KeyFeatureSpec]:
    if not entries:
        raise ConfigError("key-feature spec is empty")
    seen: set[str] = set()
    out = []
    for i, raw in enumerate(entries):
        name = raw.get("name")
        if not name:
            raise ConfigError(f"key-feature entry {i} has no name")
        if name in seen:
            raise ConfigError(f"duplicate key feature '{name}'")
        seen.add(name)
        inputs = raw.get("inputs")
        if not inputs:
            raise ConfigError(f"key feature '{name}' has no inputs")
        pairs = tuple((str(c), float(w)) for c, w in inputs.items())
        if sum(w for _, w in pairs) <= 0:
            raise ConfigError(f"key feature '{name}' has non-positive total weight")
        out.append(KeyFeatureSpec(name=name, inputs=pairs))
    return out


def load_combos(path: str | Path | None = None) -> list[KeyFeatureSpec]:
    """Load a key-feature combination spec; None loads the shipped default."""
    if path is None:
        from importlib.resources import files

        text = files("rolescout.data").joinpath("key_features.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"key-feature spec is not valid JSON: {exc}") from exc
    return parse_combos(entries)


@dataclass(frozen=True)
class FeatureMatrix:
    """Player-by-feature table plus the per-player totals used downstream."""

    player_ids: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray
    minutes: np.ndarray
    player_actions: np.ndarray
    team_actions: np.ndarray
    team_ids: tuple[str, ...]
    competition_ids: tuple[str, ...]

    def __post_init__(self):
        n = len(self.player_ids)
        if self.values.shape != (n, len(self.columns)):
            raise ValidationError("feature values shape does not match index")
        for arr in (self.minutes, self.player_actions, self.team_actions):
            if arr.shape != (n,):
                raise ValidationError("totals shape does not match rows")

    @property
    def n_players(self) -> int:
        return len(self.player_ids)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise ValidationError(f"unknown feature column '{name}'") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def row_of(self, player_id: str) -> int:
        try:
            return self.player_ids.index(player_id)
        except ValueError:
            raise ValidationError(f"unknown player '{player_id}'") from None

    def select(self, columns) -> "FeatureMatrix":
        idx = [self.column_index(c) for c in columns]
        return self._with(values=self.values[:, idx], columns=tuple(columns))

    def take_rows(self, rows) -> "FeatureMatrix":
        rows = list(rows)
        return FeatureMatrix(
            player_ids=tuple(self.player_ids[i] for i in rows),
            columns=self.columns,
            values=self.values[rows],
            minutes=self.minutes[rows],
            player_actions=self.player_actions[rows],
            team_actions=self.team_actions[rows],
            team_ids=tuple(self.team_ids[i] for i in rows),
            competition_ids=tuple(self.competition_ids[i] for i in rows),
        )

    def _with(self, values: np.ndarray, columns: tuple[str, ...]) -> "FeatureMatrix":
        return FeatureMatrix(
            player_ids=self.player_ids,
            columns=columns,
            values=values,
            minutes=self.minutes,
            player_actions=self.player_actions,
            team_actions=self.team_actions,
            team_ids=self.team_ids,
            competition_ids=self.competition_ids,
        )

    def join(self, other: "FeatureMatrix") -> "FeatureMatrix":
        """Column-concatenate two matrices over the identical player set."""
        if other.player_ids != self.player_ids:
            raise ValidationError("cannot join matrices with different player sets")
        overlap = set(self.columns) & set(other.columns)
        if overlap:
            raise ValidationError(f"joined matrices share columns: {sorted(overlap)}")
        return self._with(
            values=np.hstack([self.values, other.values]),
            columns=self.columns + other.columns,
        )

    def to_csv(self, path_or_buf, *, comments: list[str] | None = None) -> None:
        own = isinstance(path_or_buf, (str, Path))
        handle = open(path_or_buf, "w", encoding="utf-8", newline="") if own else path_or_buf
        try:
            for line in comments or []:
                handle.write(f"# {line}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(list(META_COLUMNS) + list(self.columns))
            for i, pid in enumerate(self.player_ids):
                row = [
                    pid,
                    self.team_ids[i],
                    self.competition_ids[i],
                    repr(float(self.minutes[i])),
                    repr(float(self.player_actions[i])),
                    repr(float(self.team_actions[i])),
                ]
                row.extend(repr(float(v)) for v in self.values[i])
                writer.writerow(row)
        finally:
            if own:
                handle.close()

    @classmethod
    def from_csv(cls, path_or_buf) -> "FeatureMatrix":
        own = isinstance(path_or_buf, (str, Path))
        handle = open(path_or_buf, "r", encoding="utf-8", newline="") if own else path_or_buf
        try:
            rows = [r for r in csv.reader(handle) if r and not r[0].startswith("#")]
        finally:
            if own:
                handle.close()
        if not rows:
            raise ValidationError("empty feature CSV")
        header = rows[0]
        if tuple(header[: len(META_COLUMNS)]) != META_COLUMNS:
            raise ValidationError("feature CSV header does not start with the meta columns")
        columns = tuple(header[len(META_COLUMNS) :])
        body = rows[1:]
        n = len(body)
        values = np.empty((n, len(columns)))
        minutes = np.empty(n)
        player_actions = np.empty(n)
        team_actions = np.empty(n)
        player_ids, team_ids, comp_ids = [], [], []
        for i, row in enumerate(body):
            player_ids.append(row[0])
            team_ids.append(row[1])
            comp_ids.append(row[2])
            minutes[i] = float(row[3])
            player_actions[i] = float(row[4])
            team_actions[i] = float(row[5])
            values[i] = [float(v) for v in row[6:]]
        return cls(
            player_ids=tuple(player_ids),
            columns=columns,
            values=values,
            minutes=minutes,
            player_actions=player_actions,
            team_actions=team_actions,
            team_ids=tuple(team_ids),
            competition_ids=tuple(comp_ids),
        )


@dataclass
class _PlayerTotals:
    team_id: str
    competition_id: str
    minutes: float = 0.0
    actions: int = 0


def _collect_totals(matches: list[MatchRecord]) -> dict[str, _PlayerTotals]:
    totals: dict[str, _PlayerTotals] = {}
    for match in matches:
        for ev in match.events:
            pid = ev.player.player_id
            if pid not in totals:
                totals[pid] = _PlayerTotals(ev.player.team_id, match.competition_id)
            totals[pid].actions += 1
        for pid, mins in match.minutes.items():
            if pid in totals:
                totals[pid].minutes += mins
    # players that appear in minutes maps but never act cannot be attributed
    # to a team, so they are dropped up front
    acted = set(totals)
    benched = {
        pid
        for match in matches
        for pid in match.minutes
        if pid not in acted
    }
    if benched:
        warnings.warn(f"dropped {len(benched)} players with minutes but no events")
    return totals


def _surviving_ids(totals: dict[str, _PlayerTotals], min_minutes: float) -> list[str]:
    return sorted(pid for pid, t in totals.items() if t.minutes >= min_minutes)


def aggregate_stats(
    matches: list[MatchRecord],
    registry: list[StatDefinition],
    min_minutes: float = 900.0,
    quality_fn: Callable[[Event], float] = default_shot_quality,
) -> FeatureMatrix:
    """Aggregate registry statistics per player over a set of matches.

    Rows are restricted to players with at least min_minutes played; a
    statistic with no matching events is 0.
    """
    if not matches:
        raise ValidationError("empty match set")
    if not registry:
        raise ValidationError("empty statistic registry")

    by_type: dict[EventType, list[tuple[int, StatDefinition]]] = {}
    for idx, stat in enumerate(registry):
        for t in stat.event_types:
            by_type.setdefault(t, []).append((idx, stat))

    totals = _collect_totals(matches)
    accum: dict[str, np.ndarray] = {}
    team_actions: dict[str, int] = {}
    n_stats = len(registry)
    for match in matches:
        for ev in match.events:
            pid = ev.player.player_id
            team_actions[ev.player.team_id] = team_actions.get(ev.player.team_id, 0) + 1
            row = accum.get(pid)
            if row is None:
                row = accum[pid] = np.zeros(n_stats)
            for idx, stat in by_type.get(ev.event_type, ()):
                if stat.matches(ev):
                    row[idx] += stat.value_of(ev, quality_fn)

    ids = _surviving_ids(totals, min_minutes)
    n = len(ids)
    values = np.zeros((n, n_stats))
    minutes = np.empty(n)
    player_actions = np.empty(n)
    team_action_col = np.empty(n)
    team_ids, comp_ids = [], []
    for i, pid in enumerate(ids):
        t = totals[pid]
        if pid in accum:
            values[i] = accum[pid]
        minutes[i] = t.minutes
        player_actions[i] = t.actions
        team_action_col[i] = team_actions.get(t.team_id, 0)
        team_ids.append(t.team_id)
        comp_ids.append(t.competition_id)

    return FeatureMatrix(
        player_ids=tuple(ids),
        columns=tuple(s.name for s in registry),
        values=values,
        minutes=minutes,
        player_actions=player_actions,
        team_actions=team_action_col,
        team_ids=tuple(team_ids),
        competition_ids=tuple(comp_ids),
    )


def normalize_dual(matrix: FeatureMatrix) -> FeatureMatrix:
    """Two normalized columns per statistic: per player action, per team action.

    Rows whose action counts are zero cannot be normalized and are dropped
    with a warning.
    """
    keep = (matrix.player_actions > 0) & (matrix.team_actions > 0)
    if not np.all(keep):
        warnings.warn(f"dropped {int(np.sum(~keep))} rows with zero action counts")
        matrix = matrix.take_rows(np.flatnonzero(keep))

    n, r = matrix.values.shape
    out = np.empty((n, 2 * r))
    out[:, 0::2] = matrix.values / matrix.player_actions[:, None]
    out[:, 1::2] = matrix.values / matrix.team_actions[:, None]
    columns = []
    for name in matrix.columns:
        columns.append(name + PER_PLAYER_SUFFIX)
        columns.append(name + PER_TEAM_SUFFIX)
    return matrix._with(values=out, columns=tuple(columns))


def _is_defensive(ev: Event) -> bool:
    if ev.event_type in (
        EventType.TACKLE,
        EventType.INTERCEPTION,
        EventType.CLEARANCE,
        EventType.SAVE,
    ):
        return True
    return ev.event_type is EventType.DUEL and ev.subtype == "defensive"


def _completed_passes(match: MatchRecord) -> list[tuple[str, str, str]]:
    """(team, passer, receiver) triples; the receiver is the next same-team actor."""
    events = match.events
    n = len(events)
    next_player: list[str | None] = [None] * n
    last_seen: dict[str, str] = {}
    for i in range(n - 1, -1, -1):
        team = events[i].player.team_id
        next_player[i] = last_seen.get(team)
        last_seen[team] = events[i].player.player_id
    out = []
    for i, ev in enumerate(events):
        if ev.event_type is EventType.PASS and ev.has("accurate"):
            receiver = next_player[i]
            if receiver is not None and receiver != ev.player.player_id:
                out.append((ev.player.team_id, ev.player.player_id, receiver))
    return out


def team_metrics(matches: list[MatchRecord], min_minutes: float = 900.0) -> FeatureMatrix:
    """Team-context metrics: passing-network centralities, defensive presence,
    wide contribution.

    Degree shares are a player's completed passes (made, received) over the
    team total. Betweenness and closeness are computed on the undirected
    completed-pass graph. A team with no completed passes gets centrality 0.
    """
    if not matches:
        raise ValidationError("empty match set")
    totals = _collect_totals(matches)

    team_players: dict[str, set[str]] = {}
    for pid, t in totals.items():
        team_players.setdefault(t.team_id, set()).add(pid)

    passes_out: dict[str, int] = {}
    passes_in: dict[str, int] = {}
    team_pass_total: dict[str, int] = {}
    edges: dict[str, set[tuple[str, str]]] = {}
    for match in matches:
        for team, passer, receiver in _completed_passes(match):
            passes_out[passer] = passes_out.get(passer, 0) + 1
            passes_in[receiver] = passes_in.get(receiver, 0) + 1
            team_pass_total[team] = team_pass_total.get(team, 0) + 1
            edge = (passer, receiver) if passer < receiver else (receiver, passer)
            edges.setdefault(team, set()).add(edge)

    betweenness: dict[str, float] = {}
    closeness: dict[str, float] = {}
    for team in sorted(team_players):
        graph = nx.Graph()
        graph.add_nodes_from(sorted(team_players[team]))
        graph.add_edges_from(sorted(edges.get(team, ())))
        betweenness.update(nx.betweenness_centrality(graph, normalized=True))
        closeness.update(nx.closeness_centrality(graph))

    defensive: dict[str, int] = {}
    team_defensive: dict[str, int] = {}
    flank_actions: dict[str, int] = {}
    for match in matches:
        for ev in match.events:
            pid = ev.player.player_id
            if _is_defensive(ev):
                defensive[pid] = defensive.get(pid, 0) + 1
                team_defensive[ev.player.team_id] = (
                    team_defensive.get(ev.player.team_id, 0) + 1
                )
            if "flank" in ev.zones:
                flank_actions[pid] = flank_actions.get(pid, 0) + 1

    ids = _surviving_ids(totals, min_minutes)
    n = len(ids)
    values = np.zeros((n, len(TEAM_METRIC_COLUMNS)))
    minutes = np.empty(n)
    player_actions = np.empty(n)
    team_action_col = np.empty(n)
    team_ids, comp_ids = [], []
    team_actions: dict[str, int] = {}
    for pid, t in totals.items():
        team_actions[t.team_id] = team_actions.get(t.team_id, 0) + t.actions
    for i, pid in enumerate(ids):
        t = totals[pid]
        tp = team_pass_total.get(t.team_id, 0)
        td = team_defensive.get(t.team_id, 0)
        values[i, 0] = passes_out.get(pid, 0) / tp if tp else 0.0
        values[i, 1] = passes_in.get(pid, 0) / tp if tp else 0.0
        values[i, 2] = betweenness.get(pid, 0.0)
        values[i, 3] = closeness.get(pid, 0.0)
        values[i, 4] = defensive.get(pid, 0) / td if td else 0.0
        values[i, 5] = flank_actions.get(pid, 0) / t.actions if t.actions else 0.0
        minutes[i] = t.minutes
        player_actions[i] = t.actions
        team_action_col[i] = team_actions[t.team_id]
        team_ids.append(t.team_id)
        comp_ids.append(t.competition_id)

    return FeatureMatrix(
        player_ids=tuple(ids),
        columns=TEAM_METRIC_COLUMNS,
        values=values,
        minutes=minutes,
        player_actions=player_actions,
        team_actions=team_action_col,
        team_ids=tuple(team_ids),
        competition_ids=tuple(comp_ids),
    )


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column mean/std (sample estimator) with constant-column flags."""

    columns: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray
    by_competition: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] | None = field(
        default=None, hash=False
    )

    def apply_values(self, values: np.ndarray, competitions=None) -> np.ndarray:
        if self.by_competition is None:
            std_safe = np.where(self.constant, 1.0, self.std)
            z = (values - self.mean) / std_safe
            z[:, self.constant] = 0.0
            return np.clip(z, -CLIP_SIGMA, CLIP_SIGMA)
        if competitions is None:
            raise ValidationError("per-competition params need competition ids")
        out = np.empty_like(values)
        for i, comp in enumerate(competitions):
            if comp not in self.by_competition:
                raise ValidationError(f"no standardization fitted for competition '{comp}'")
            mean, std, constant = self.by_competition[comp]
            std_safe = np.where(constant, 1.0, std)
            z = (values[i] - mean) / std_safe
            z[constant] = 0.0
            out[i] = np.clip(z, -CLIP_SIGMA, CLIP_SIGMA)
        return out

    def apply(self, matrix: FeatureMatrix) -> FeatureMatrix:
        if matrix.columns != self.columns:
            raise ValidationError("matrix columns do not match standardization params")
        return matrix._with(
            values=self.apply_values(matrix.values, matrix.competition_ids),
            columns=matrix.columns,
        )

    def to_dict(self) -> dict:
        if self.by_competition is not None:
            raise ValidationError("per-competition params are not serializable")
        return {
            "columns": list(self.columns),
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "constant": [bool(v) for v in self.constant],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StandardizationParams":
        return cls(
            columns=tuple(d["columns"]),
            mean=np.asarray(d["mean"], dtype=np.float64),
            std=np.asarray(d["std"], dtype=np.float64),
            constant=np.asarray(d["constant"], dtype=bool),
        )


def fit_standardization(
    values: np.ndarray, columns: tuple[str, ...]
) -> StandardizationParams:
    if values.shape[0] < 2:
        raise ValidationError("standardization needs at least 2 rows")
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1)
    constant = std == 0.0
    return StandardizationParams(columns=columns, mean=mean, std=std, constant=constant)


def standardize(
    matrix: FeatureMatrix, by_competition: bool = False
) -> tuple[FeatureMatrix, StandardizationParams]:
    """Z-score each column and clip to [-2, 2]; constant columns map to 0.

    Returns the projected matrix and the fitted parameters for reuse at
    scoring time.
    """
    if not by_competition:
        params = fit_standardization(matrix.values, matrix.columns)
        return params.apply(matrix), params

    groups: dict[str, list[int]] = {}
    for i, comp in enumerate(matrix.competition_ids):
        groups.setdefault(comp, []).append(i)
    per_comp = {}
    for comp, rows in sorted(groups.items()):
        if len(rows) < 2:
            raise ValidationError(
                f"competition '{comp}' has fewer than 2 rows; cannot standardize"
            )
        sub = matrix.values[rows]
        per_comp[comp] = (sub.mean(axis=0), sub.std(axis=0, ddof=1), sub.std(axis=0, ddof=1) == 0.0)
    params = StandardizationParams(
        columns=matrix.columns,
        mean=np.zeros(len(matrix.columns)),
        std=np.ones(len(matrix.columns)),
        constant=np.zeros(len(matrix.columns), dtype=bool),
        by_competition=per_comp,
    )
    return params.apply(matrix), params


def combine_key_features(
    matrix: FeatureMatrix, combos: list[KeyFeatureSpec]
) -> FeatureMatrix:
    """Append key-feature columns: weighted means of standardized inputs.

    The input matrix must already be standardized; key values are re-clipped
    to [-2, 2].
    """
    kf = key_feature_values(matrix.values, matrix.columns, combos)
    appended = matrix._with(
        values=np.hstack([matrix.values, kf]),
        columns=matrix.columns + tuple(c.name for c in combos),
    )
    return appended


def key_feature_values(
    values: np.ndarray, columns: tuple[str, ...], combos: list[KeyFeatureSpec]
) -> np.ndarray:
    col_index = {c: i for i, c in enumerate(columns)}
    out = np.empty((values.shape[0], len(combos)))
    for k, combo in enumerate(combos):
        acc = np.zeros(values.shape[0])
        total = 0.0
        for col, weight in combo.inputs:
            if col not in col_index:
                raise ConfigError(f"key feature '{combo.name}' references unknown column '{col}'")
            acc += weight * values[:, col_index[col]]
            total += weight
        out[:, k] = np.clip(acc / total, -CLIP_SIGMA, CLIP_SIGMA)
    return out


def registry_fingerprint(registry: list[StatDefinition]) -> str:
    """Stable hash of a registry, stamped into model bundles for provenance."""
    payload = json.dumps(
        [
            {
                "name": s.name,
                "event_types": sorted(t.value for t in s.event_types),
                "subtypes": sorted(s.subtypes),
                "require": s.require_qualifiers,
                "exclude": s.exclude_qualifiers,
                "zones": sorted(s.zones),
                "end_zones": sorted(s.end_zones),
                "value": s.value,
                "weights": list(s.weights),
            }
            for s in registry
        ],
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def base_model_columns(columns) -> list[str]:
    """Model-input columns in a feature table: normalized stats + team metrics."""
    return [
        c
        for c in columns
        if c.endswith(PER_PLAYER_SUFFIX)
        or c.endswith(PER_TEAM_SUFFIX)
        or c in TEAM_METRIC_COLUMNS
    ]


@dataclass(frozen=True)
class FeatureTable:
    """Outputs of the full feature stage.

    base holds the unstandardized model inputs (normalized stats + team
    metrics); full adds raw counts and globally standardized key features
    for inspection and export.
    """

    base: FeatureMatrix
    full: FeatureMatrix
    counts: dict[str, int]


def build_feature_table(
    matches: list[MatchRecord],
    registry: list[StatDefinition],
    combos: list[KeyFeatureSpec],
    min_minutes: float = 900.0,
    by_competition: bool = False,
    quality_fn: Callable[[Event], float] = default_shot_quality,
) -> FeatureTable:
    raw = aggregate_stats(matches, registry, min_minutes, quality_fn)
    normalized = normalize_dual(raw)
    team = team_metrics(matches, min_minutes)
    if normalized.player_ids != team.player_ids:
        # normalize_dual may have dropped zero-action rows
        keep = [team.row_of(pid) for pid in normalized.player_ids]
        team = team.take_rows(keep)
        raw = raw.take_rows([raw.row_of(pid) for pid in normalized.player_ids])
    base = normalized.join(team)
    standardized, _ = standardize(base, by_competition=by_competition)
    with_keys = combine_key_features(standardized, combos)
    kf_columns = tuple(c.name for c in combos)
    full = raw.join(base)._with(
        values=np.hstack([raw.values, base.values, with_keys.select(kf_columns).values]),
        columns=raw.columns + base.columns + kf_columns,
    )
    counts = {
        "base": len(raw.columns),
        "normalized": 2 * len(raw.columns),
        "team": len(TEAM_METRIC_COLUMNS),
        "key": len(combos),
        "players": base.n_players,
    }
    return FeatureTable(base=base, full=full, counts=counts)
