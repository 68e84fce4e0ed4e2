import numpy as np
import pytest

from rolescout.events import (
    N_QUALIFIERS,
    QUALIFIER_NAMES,
    Event,
    EventType,
    MatchRecord,
    PlayerRef,
    pack_qualifiers,
    qualifier_mask,
    unpack_qualifiers,
    zone_of,
)

from .helpers import make_event


class TestZones:
    def test_pitch_center(self):
        # center of the pitch: possession zone and central, but not own half
        tags = zone_of(50.0, 50.0)
        assert "possession_zone" in tags
        assert "central" in tags
        assert "own_half" not in tags

    def test_inside_opposite_box(self):
        tags = zone_of(90.0, 50.0)
        assert "final_third" in tags
        assert "opposite_box" in tags

    def test_box_needs_central_band(self):
        assert "opposite_box" not in zone_of(90.0, 10.0)
        assert "opposite_box" in zone_of(84.0, 21.0)

    def test_deep_left_flank(self):
        tags = zone_of(10.0, 5.0)
        assert "own_half" in tags
        assert "flank" in tags
        assert "flank_left" in tags
        assert "central" not in tags

    def test_lateral_bands_partition_pitch(self):
        rng = np.random.default_rng(0)
        for x, y in rng.uniform(0.0, 100.0, size=(2000, 2)):
            tags = zone_of(x, y)
            lateral = [t for t in ("flank_left", "central", "flank_right") if t in tags]
            assert len(lateral) == 1
            assert ("flank" in tags) == ("central" not in tags)

    def test_zone_of_is_pure(self):
        assert zone_of(37.2, 81.4) == zone_of(37.2, 81.4)


class TestQualifiers:
    def test_manifest_has_59_slots(self):
        assert len(QUALIFIER_NAMES) == N_QUALIFIERS == 59
        assert len(set(QUALIFIER_NAMES)) == 59

    def test_pack_unpack_roundtrip(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            flags = list(rng.random(N_QUALIFIERS) < 0.3)
            assert unpack_qualifiers(pack_qualifiers(flags)) == flags

    def test_event_has_and_vector(self):
        ev = make_event(quals=("accurate", "long_ball"))
        assert ev.has("accurate") and ev.has("long_ball")
        assert not ev.has("header")
        vec = ev.qualifier_vector()
        assert len(vec) == 59 and sum(vec) == 2


class TestEventInvariants:
    def test_player_ref_must_be_non_empty(self):
        with pytest.raises(ValueError):
            PlayerRef("", "t1")
        with pytest.raises(ValueError):
            PlayerRef("p1", "")

    def test_coordinates_must_be_on_pitch(self):
        with pytest.raises(ValueError):
            make_event(x=101.0)
        with pytest.raises(ValueError):
            make_event(y=-0.5)
        with pytest.raises(ValueError):
            make_event(end=(100.5, 50.0))

    def test_end_location_only_on_directional_types(self):
        make_event(etype="pass", end=(70.0, 50.0))
        make_event(etype="clearance", end=(70.0, 50.0))
        with pytest.raises(ValueError):
            make_event(etype="tackle", end=(70.0, 50.0))

    def test_unknown_subtype_rejected(self):
        with pytest.raises(ValueError):
            make_event(etype="duel", subtype="sliding")
        with pytest.raises(ValueError):
            make_event(etype="tackle", subtype="defensive")

    def test_negative_minute_rejected(self):
        with pytest.raises(ValueError):
            make_event(minute=-1.0)

    def test_end_zones_empty_without_end(self):
        assert make_event(etype="tackle").end_zones == frozenset()
        assert "final_third" in make_event(end=(80.0, 50.0)).end_zones


class TestMatchRecord:
    def test_events_must_be_ordered(self):
        events = (make_event(minute=5.0), make_event(minute=1.0))
        with pytest.raises(ValueError):
            MatchRecord("m1", "c1", events, {"p1": 90.0})

    def test_every_actor_needs_minutes(self):
        with pytest.raises(ValueError):
            MatchRecord("m1", "c1", (make_event(player="ghost"),), {"p1": 90.0})

    def test_players_listing(self):
        record = MatchRecord(
            "m1",
            "c1",
            (make_event(player="a"), make_event(player="b", minute=1.0)),
            {"a": 90.0, "b": 45.0},
        )
        assert [p.player_id for p in record.players()] == ["a", "b"]
