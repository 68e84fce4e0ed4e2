"""Parsing and serialization of the newline-delimited ingest format.

One line per event, JSON-encoded, fields as documented in docs/format.md.
A dataset directory holds one ``<match_id>.jsonl`` file per match plus a
``matches.meta.json`` file mapping match ids to competition ids and
per-player minutes. Parsing is stateless per match; matches may be parsed
in parallel.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import ParseError
from .events import (
    DIRECTIONAL_TYPES,
    N_QUALIFIERS,
    Event,
    EventType,
    MatchRecord,
    PlayerRef,
    pack_qualifiers,
    unpack_qualifiers,
)

META_FILENAME = "matches.meta.json"

_EVENT_TYPE_VALUES = {t.value for t in EventType}


@dataclass(frozen=True)
class MatchMeta:
    match_id: str
    competition_id: str
    minutes: dict[str, float]


def load_meta(path: str | Path) -> dict[str, MatchMeta]:
    """Load the matches.meta.json file for a dataset directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in meta file: {exc}", path=str(path)) from exc
    if not isinstance(raw, dict):
        raise ParseError("meta file must be a JSON object", path=str(path))
    out: dict[str, MatchMeta] = {}
    for match_id, entry in raw.items():
        if not isinstance(entry, dict) or "competition_id" not in entry or "minutes" not in entry:
            raise ParseError(
                f"meta entry for {match_id} needs competition_id and minutes",
                path=str(path),
            )
        minutes = {str(k): float(v) for k, v in entry["minutes"].items()}
        out[match_id] = MatchMeta(match_id, str(entry["competition_id"]), minutes)
    return out


def _parse_event_obj(obj: dict, line_no: int, path: str | None, strict: bool) -> Event:
    def fail(msg: str):
        raise ParseError(msg, line=line_no, path=path)

    for field_name in ("match_id", "team_id", "player_id", "type", "q", "x", "y", "minute"):
        if field_name not in obj:
            fail(f"missing field '{field_name}'")

    type_str = obj["type"]
    if type_str not in _EVENT_TYPE_VALUES:
        if strict:
            fail(f"unknown event type '{type_str}'")
        event_type = EventType.OTHER
        subtype = None
        end_x = end_y = None
    else:
        event_type = EventType(type_str)
        subtype = obj.get("subtype")
        end_x = obj.get("end_x")
        end_y = obj.get("end_y")

    q = obj["q"]
    if not isinstance(q, list) or len(q) != N_QUALIFIERS:
        fail(f"qualifier vector wrong length (expected {N_QUALIFIERS}, got "
             f"{len(q) if isinstance(q, list) else 'non-array'})")
    for v in q:
        if not isinstance(v, (bool, int)) or (isinstance(v, int) and v not in (0, 1)):
            fail("qualifier vector entries must be booleans")

    try:
        event = Event(
            match_id=str(obj["match_id"]),
            player=PlayerRef(str(obj["player_id"]), str(obj["team_id"])),
            event_type=event_type,
            subtype=str(subtype) if subtype is not None else None,
            qualifiers=pack_qualifiers(q),
            x=float(obj["x"]),
            y=float(obj["y"]),
            end_x=float(end_x) if end_x is not None else None,
            end_y=float(end_y) if end_y is not None else None,
            minute=float(obj["minute"]),
        )
    except (TypeError, ValueError) as exc:
        fail(str(exc))
    return event


def parse_match(
    stream: Iterable[str] | io.IOBase | str | bytes,
    meta: MatchMeta,
    *,
    strict: bool = False,
    path: str | None = None,
) -> MatchRecord:
    """Parse one match's event stream into a validated MatchRecord.

    Unknown event types are mapped to ``other`` unless strict is set, in
    which case they are rejected. Any invariant violation raises ParseError
    with the offending line number.
    """
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        lines: Iterable[str] = stream.splitlines()
    else:
        lines = stream

    events: list[Event] = []
    mapped_other = 0
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed record: {exc.msg}", line=line_no, path=path) from exc
        if not isinstance(obj, dict):
            raise ParseError("malformed record: not a JSON object", line=line_no, path=path)
        event = _parse_event_obj(obj, line_no, path, strict)
        if event.event_type is EventType.OTHER and obj["type"] not in _EVENT_TYPE_VALUES:
            mapped_other += 1
        if event.match_id != meta.match_id:
            raise ParseError(
                f"event match_id '{event.match_id}' does not match meta "
                f"'{meta.match_id}'",
                line=line_no,
                path=path,
            )
        if event.player.player_id not in meta.minutes:
            raise ParseError(
                f"player {event.player.player_id} not in minutes map",
                line=line_no,
                path=path,
            )
        events.append(event)

    if mapped_other:
        warnings.warn(f"{mapped_other} events with unknown type mapped to 'other'")

    events.sort(key=lambda ev: ev.minute)  # stable: ties keep input order
    return MatchRecord(
        match_id=meta.match_id,
        competition_id=meta.competition_id,
        events=tuple(events),
        minutes=dict(meta.minutes),
    )


def event_to_obj(event: Event) -> dict:
    obj = {
        "match_id": event.match_id,
        "team_id": event.player.team_id,
        "player_id": event.player.player_id,
        "type": event.event_type.value,
        "subtype": event.subtype,
        "q": unpack_qualifiers(event.qualifiers),
        "x": event.x,
        "y": event.y,
        "end_x": event.end_x,
        "end_y": event.end_y,
        "minute": event.minute,
    }
    if obj["subtype"] is None:
        del obj["subtype"]
    if obj["end_x"] is None:
        del obj["end_x"]
        del obj["end_y"]
    return obj


def serialize_match(record: MatchRecord) -> str:
    """Canonical JSONL form: fixed key order, compact separators."""
    lines = [json.dumps(event_to_obj(ev), separators=(",", ":")) for ev in record.events]
    return "\n".join(lines) + ("\n" if lines else "")


def meta_to_json(metas: dict[str, MatchMeta]) -> str:
    payload = {
        mid: {"competition_id": m.competition_id, "minutes": m.minutes}
        for mid, m in sorted(metas.items())
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_dataset(directory: str | Path, *, strict: bool = False) -> list[MatchRecord]:
    """Parse every ``*.jsonl`` match file in a dataset directory.

    Files are processed in sorted name order; each file holds exactly one
    match whose id equals the file stem.
    """
    directory = Path(directory)
    meta_path = directory / META_FILENAME
    if not meta_path.exists():
        raise ParseError(f"missing {META_FILENAME}", path=str(directory))
    metas = load_meta(meta_path)
    files = sorted(directory.glob("*.jsonl"))
    if not files:
        raise ParseError("no matches found", path=str(directory))
    records = []
    for f in files:
        match_id = f.stem
        if match_id not in metas:
            raise ParseError(f"match '{match_id}' missing from meta file", path=str(f))
        with f.open("r", encoding="utf-8") as handle:
            records.append(parse_match(handle, metas[match_id], strict=strict, path=str(f)))
    return records
