"""Builders for hand-made events and matches used across the tests."""

from rolescout.events import Event, EventType, MatchRecord, PlayerRef, qualifier_mask


def make_event(
    etype="pass",
    subtype=None,
    quals=(),
    x=50.0,
    y=50.0,
    end=None,
    minute=0.0,
    player="p1",
    team="t1",
    match="m1",
):
    end_x, end_y = end if end is not None else (None, None)
    return Event(
        match_id=match,
        player=PlayerRef(player, team),
        event_type=EventType(etype),
        subtype=subtype,
        qualifiers=qualifier_mask(quals),
        x=x,
        y=y,
        end_x=end_x,
        end_y=end_y,
        minute=minute,
    )


def make_match(events, minutes, match="m1", competition="comp-1"):
    events = tuple(sorted(events, key=lambda ev: ev.minute))
    return MatchRecord(
        match_id=match, competition_id=competition, events=events, minutes=minutes
    )
