import json

import pytest

from rolescout.errors import ParseError
from rolescout.events import N_QUALIFIERS
from rolescout.ingest import (
    MatchMeta,
    load_dataset,
    load_meta,
    meta_to_json,
    parse_match,
    serialize_match,
)
from rolescout.synth import LeagueSpec, generate_league, write_league

from .helpers import make_event, make_match

META = MatchMeta("m1", "comp-1", {"p1": 90.0, "p2": 90.0})


def event_line(**overrides):
    obj = {
        "match_id": "m1",
        "team_id": "t1",
        "player_id": "p1",
        "type": "pass",
        "subtype": "simple",
        "q": [False] * N_QUALIFIERS,
        "x": 50.0,
        "y": 40.0,
        "end_x": 60.0,
        "end_y": 45.0,
        "minute": 12.5,
    }
    obj.update(overrides)
    return json.dumps({k: v for k, v in obj.items() if v is not None})


def test_single_pass_record_parses():
    record = parse_match(event_line(), META)
    assert len(record.events) == 1
    ev = record.events[0]
    assert ev.event_type.value == "pass"
    assert ev.end_x == 60.0
    assert record.competition_id == "comp-1"


def test_serialize_parse_is_identity_on_canonical_form():
    match = make_match(
        [
            make_event(quals=("accurate",), minute=1.0, end=(60.0, 50.0)),
            make_event(etype="interception", player="p2", minute=2.25, x=40.0),
            make_event(etype="duel", subtype="defensive", quals=("won", "ground"), minute=3.5),
        ],
        {"p1": 90.0, "p2": 90.0},
    )
    canonical = serialize_match(match)
    reparsed = parse_match(canonical, META)
    assert reparsed == match
    assert serialize_match(reparsed) == canonical


def test_parser_sorts_by_minute_keeping_tie_order():
    lines = "\n".join(
        [
            event_line(minute=30.0, player_id="p2", end_x=None, end_y=None, subtype=None),
            event_line(minute=5.0),
            event_line(minute=30.0, player_id="p1", end_x=None, end_y=None, subtype=None),
        ]
    )
    record = parse_match(lines, META)
    assert [ev.minute for ev in record.events] == [5.0, 30.0, 30.0]
    assert [ev.player.player_id for ev in record.events][1:] == ["p2", "p1"]


def test_wrong_qualifier_length_is_an_error_with_position():
    with pytest.raises(ParseError, match="qualifier vector wrong length") as err:
        parse_match(event_line(q=[False] * 58), META, path="m1.jsonl")
    assert err.value.line == 1
    assert "m1.jsonl" in str(err.value)


def test_out_of_range_coordinate_rejected():
    with pytest.raises(ParseError, match="outside"):
        parse_match(event_line(x=120.0), META)


def test_malformed_json_reports_line():
    stream = event_line() + "\n{not json"
    with pytest.raises(ParseError, match="malformed record") as err:
        parse_match(stream, META)
    assert err.value.line == 2


def test_unknown_type_maps_to_other_by_default():
    line = event_line(type="rabona", subtype=None, end_x=None, end_y=None)
    with pytest.warns(UserWarning, match="mapped to 'other'"):
        record = parse_match(line, META)
    assert record.events[0].event_type.value == "other"
    assert record.events[0].subtype is None


def test_unknown_type_rejected_in_strict_mode():
    line = event_line(type="rabona")
    with pytest.raises(ParseError, match="unknown event type"):
        parse_match(line, META, strict=True)


def test_missing_field_reported():
    obj = json.loads(event_line())
    del obj["player_id"]
    with pytest.raises(ParseError, match="missing field 'player_id'"):
        parse_match(json.dumps(obj), META)


def test_player_not_in_minutes_map_rejected():
    with pytest.raises(ParseError, match="not in minutes map"):
        parse_match(event_line(player_id="ghost"), META)


def test_mismatched_match_id_rejected():
    with pytest.raises(ParseError, match="does not match meta"):
        parse_match(event_line(match_id="m2"), META)


def test_comments_and_blank_lines_skipped():
    stream = "# header comment\n\n" + event_line()
    assert len(parse_match(stream, META).events) == 1


def test_synthetic_stream_event_count_matches_generator():
    # the generator knows exactly how many events it emitted; parsing its
    # serialized stream must yield the same count
    spec = LeagueSpec(teams=1, players_per_team=11, matches_per_team=1, seed=3)
    matches, _ = generate_league(spec)
    assert len(matches) == 1
    record = matches[0]
    meta = MatchMeta(record.match_id, record.competition_id, record.minutes)
    reparsed = parse_match(serialize_match(record), meta)
    assert len(reparsed.events) == len(record.events)
    assert reparsed == record


def test_load_dataset_roundtrip(tmp_path):
    spec = LeagueSpec(teams=2, players_per_team=11, matches_per_team=2, seed=5)
    matches, truth = generate_league(spec)
    labels = truth  # full labels are fine here
    write_league(matches, truth, labels, tmp_path)
    records = load_dataset(tmp_path)
    assert len(records) == len(matches)
    assert sum(len(r.events) for r in records) == sum(len(m.events) for m in matches)


def test_load_dataset_requires_meta(tmp_path):
    (tmp_path / "m1.jsonl").write_text(event_line() + "\n")
    with pytest.raises(ParseError, match="matches.meta.json"):
        load_dataset(tmp_path)


def test_load_dataset_empty_directory(tmp_path):
    (tmp_path / "matches.meta.json").write_text("{}")
    with pytest.raises(ParseError, match="no matches found"):
        load_dataset(tmp_path)


def test_meta_roundtrip(tmp_path):
    metas = {"m1": META, "m0": MatchMeta("m0", "comp-2", {"p9": 45.0})}
    path = tmp_path / "matches.meta.json"
    path.write_text(meta_to_json(metas))
    loaded = load_meta(path)
    assert loaded["m1"].minutes == META.minutes
    assert loaded["m0"].competition_id == "comp-2"
