"""Event parsing, window aggregation, synthetic scenario generation."""

import io
import json
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from gridscope import (
    ActivityEvent,
    ScenarioConfig,
    WindowSpec,
    parse_events,
    self_risk,
    synthesize,
    window_profiles,
)
from gridscope.ingest import Anomaly, events_to_jsonl

ORIGIN = datetime(2016, 1, 1, tzinfo=timezone.utc)


def spec3() -> WindowSpec:
    return WindowSpec(origin=ORIGIN, width=timedelta(days=1), count=3)


def jl(*objs) -> io.StringIO:
    return io.StringIO("\n".join(json.dumps(o) for o in objs) + "\n")


class TestParseEvents:
    def test_default_weight(self):
        events = parse_events(jl({"ts": "2016-01-01T00:00:00Z", "entity": "u1", "topic": "t1"}))
        assert len(events) == 1
        assert events[0].weight == 1.0
        assert events[0].ts == ORIGIN

    def test_negative_weight_rejected_strict(self):
        stream = jl(
            {"ts": "2016-01-01T00:00:00Z", "entity": "u1", "topic": "t1"},
            {"ts": "2016-01-01T01:00:00Z", "entity": "u1", "topic": "t1", "weight": -2},
        )
        with pytest.raises(ValueError, match="line 2"):
            parse_events(stream)

    def test_negative_weight_skipped_lenient(self, caplog):
        stream = jl(
            {"ts": "2016-01-01T00:00:00Z", "entity": "u1", "topic": "t1"},
            {"ts": "2016-01-01T01:00:00Z", "entity": "u1", "topic": "t1", "weight": -2},
            {"ts": "2016-01-01T02:00:00Z", "entity": "u1", "topic": "t2"},
        )
        with caplog.at_level("WARNING", logger="gridscope.ingest"):
            events = parse_events(stream, strict=False)
        assert len(events) == 2
        assert any("line 2" in rec.getMessage() for rec in caplog.records)

    def test_order_preserved(self):
        stream = jl(
            {"ts": "2016-01-01T05:00:00Z", "entity": "u1", "topic": "t2"},
            {"ts": "2016-01-01T01:00:00Z", "entity": "u1", "topic": "t1"},
            {"ts": "2016-01-01T03:00:00Z", "entity": "u1", "topic": "t1"},
        )
        events = parse_events(stream)
        assert [e.topic for e in events] == ["t2", "t1", "t1"]
        assert [e.ts.hour for e in events] == [5, 1, 3]

    def test_csv_variant(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(
            "ts,entity,topic,weight\n"
            "2016-01-01T00:00:00Z,u1,t1,2.5\n"
            "2016-01-01T01:00:00Z,u2,t2,\n"
        )
        events = parse_events(path)
        assert events[0].weight == 2.5
        assert events[1].weight == 1.0

    def test_bad_timestamp_names_line(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_events(jl({"ts": "not-a-time", "entity": "u1", "topic": "t1"}))

    def test_jsonl_round_trip(self):
        events = [
            ActivityEvent(ORIGIN + timedelta(hours=h), "u1", f"t{h % 2}", weight=float(h))
            for h in range(1, 4)
        ]
        again = parse_events(io.StringIO(events_to_jsonl(events)))
        assert again == events


class TestWindowProfiles:
    def test_weights_sum_per_topic(self):
        events = [
            ActivityEvent(ORIGIN + timedelta(hours=1), "u1", "t1"),
            ActivityEvent(ORIGIN + timedelta(hours=2), "u1", "t1"),
        ]
        profiles = window_profiles(events, spec3())
        first = profiles[0]
        assert first.window.start == ORIGIN
        assert first.weights == {"t1": 2.0}

    def test_boundary_event_goes_to_later_window(self):
        events = [ActivityEvent(ORIGIN + timedelta(days=1), "u1", "t1")]
        profiles = {p.window.start: p for p in window_profiles(events, spec3())}
        assert profiles[ORIGIN].weights == {}
        assert profiles[ORIGIN + timedelta(days=1)].weights == {"t1": 1.0}

    def test_hand_aggregated_fixture(self):
        events = [
            ActivityEvent(ORIGIN + timedelta(hours=12), "u1", "t1", 1.0),
            ActivityEvent(ORIGIN + timedelta(hours=13), "u1", "t1", 2.0),
            ActivityEvent(ORIGIN + timedelta(hours=6), "u1", "t2", 1.0),
            ActivityEvent(ORIGIN + timedelta(days=1, hours=4), "u1", "t1", 1.0),
            ActivityEvent(ORIGIN + timedelta(hours=9), "u2", "t1", 1.0),
            ActivityEvent(ORIGIN + timedelta(days=2, hours=2), "u2", "t2", 4.0),
            ActivityEvent(ORIGIN + timedelta(days=2, hours=3), "u1", "t3", 1.0),
            ActivityEvent(ORIGIN + timedelta(days=1, hours=23), "u2", "t1", 0.5),
            ActivityEvent(ORIGIN + timedelta(days=3, hours=1), "u1", "t1", 7.0),  # out of range
            ActivityEvent(ORIGIN + timedelta(days=1), "u1", "t2", 1.0),  # boundary
        ]
        profiles = window_profiles(events, spec3())
        table = {(p.entity_id, p.window.start): p.weights for p in profiles}
        day = timedelta(days=1)
        assert table[("u1", ORIGIN)] == {"t1": 3.0, "t2": 1.0}
        assert table[("u1", ORIGIN + day)] == {"t1": 1.0, "t2": 1.0}
        assert table[("u1", ORIGIN + 2 * day)] == {"t3": 1.0}
        assert table[("u2", ORIGIN)] == {"t1": 1.0}
        assert table[("u2", ORIGIN + day)] == {"t1": 0.5}
        assert table[("u2", ORIGIN + 2 * day)] == {"t2": 4.0}
        assert len(profiles) == 6

    def test_weight_conservation(self, rng):
        events = [
            ActivityEvent(
                ORIGIN + timedelta(hours=float(rng.uniform(-24, 96))),
                f"u{int(rng.integers(1, 4))}",
                f"t{int(rng.integers(1, 5))}",
                float(rng.uniform(0, 3)),
            )
            for _ in range(200)
        ]
        spec = spec3()
        in_range = sum(e.weight for e in events if spec.index_of(e.ts) is not None)
        profiles = window_profiles(events, spec)
        total = sum(sum(p.weights.values()) for p in profiles)
        assert total == pytest.approx(in_range, rel=1e-12)

    def test_additive_aggregation(self):
        a = [ActivityEvent(ORIGIN + timedelta(hours=1), "u1", "t1", 1.0)]
        b = [ActivityEvent(ORIGIN + timedelta(hours=2), "u1", "t1", 2.0)]
        merged = window_profiles(a + b, spec3())
        separate_a = {(p.entity_id, p.window.start): p for p in window_profiles(a, spec3())}
        separate_b = {(p.entity_id, p.window.start): p for p in window_profiles(b, spec3())}
        for p in merged:
            key = (p.entity_id, p.window.start)
            expect = {}
            for part in (separate_a, separate_b):
                for t, w in part[key].weights.items():
                    expect[t] = expect.get(t, 0.0) + w
            assert p.weights == expect

    def test_entity_filter_produces_exact_set(self):
        events = [ActivityEvent(ORIGIN, "u1", "t1"), ActivityEvent(ORIGIN, "u2", "t1")]
        profiles = window_profiles(events, spec3(), entities=["u2", "u9"])
        assert sorted({p.entity_id for p in profiles}) == ["u2", "u9"]
        assert all(p.weights == {} for p in profiles if p.entity_id == "u9")


class TestSynthesize:
    def small_config(self, anomalies=()):
        return ScenarioConfig(
            entities=4, topics=8, windows=4, base_rate=60.0,
            anomalies=anomalies, vector_dim=16, clusters=3,
        )

    def test_deterministic_bytes(self):
        cfg = self.small_config()
        a = synthesize(cfg, seed=5)
        b = synthesize(cfg, seed=5)
        assert events_to_jsonl(a.events) == events_to_jsonl(b.events)
        assert a.topics == b.topics
        np.testing.assert_array_equal(a.vectors.vectors, b.vectors.vectors)

    def test_different_seeds_differ(self):
        cfg = self.small_config()
        assert events_to_jsonl(synthesize(cfg, seed=1).events) != events_to_jsonl(
            synthesize(cfg, seed=2).events
        )

    def test_unknown_anomaly_reference_rejected(self):
        with pytest.raises(ValueError, match="unknown topic"):
            synthesize(self.small_config(anomalies=(Anomaly("u01", "t99", 1, 20.0),)))
        with pytest.raises(ValueError, match="unknown entity"):
            synthesize(self.small_config(anomalies=(Anomaly("zz", "t01", 1, 20.0),)))
        with pytest.raises(ValueError, match="unknown window"):
            synthesize(self.small_config(anomalies=(Anomaly("u01", "t01", 99, 20.0),)))

    def test_planted_anomaly_has_expected_scale(self):
        anomaly = Anomaly("u01", "t03", 2, 20.0)
        data = synthesize(self.small_config(anomalies=(anomaly,)), seed=7)
        profiles = window_profiles(data.events, data.window_spec)
        table = {(p.entity_id, data.window_spec.index_of(p.window.start)): p for p in profiles}
        planted = table[("u01", 2)].weights["t03"]
        usual = table[("u01", 1)].weights["t03"]
        assert planted > 5 * usual

    def test_quiet_scenario_risks_stay_low(self):
        # no planted anomaly: at least 95% of topic-windows stay below 0.2
        low, total = 0, 0
        for seed in range(20):
            data = synthesize(
                ScenarioConfig(entities=4, topics=12, windows=4, base_rate=120.0,
                               vector_dim=16, clusters=3),
                seed=seed,
            )
            profiles = window_profiles(data.events, data.window_spec)
            table = {(p.entity_id, data.window_spec.index_of(p.window.start)): p for p in profiles}
            topics = [t.topic_id for t in data.topics]
            for entity in data.entities:
                for w in range(1, data.window_spec.count):
                    history = [table[(entity, i)] for i in range(w)]
                    grid = self_risk(table[(entity, w)], history, lam=0.5, universe=topics)
                    for value in grid.values.values():
                        total += 1
                        if value < 0.2:
                            low += 1
        assert low / total >= 0.95

    def test_planted_anomaly_is_argmax(self):
        hits = 0
        for seed in range(3):
            anomaly = Anomaly("u02", "t05", 3, 20.0)
            data = synthesize(self.small_config(anomalies=(anomaly,)), seed=seed)
            profiles = window_profiles(data.events, data.window_spec)
            table = {(p.entity_id, data.window_spec.index_of(p.window.start)): p for p in profiles}
            topics = [t.topic_id for t in data.topics]
            history = [table[("u02", i)] for i in range(3)]
            grid = self_risk(table[("u02", 3)], history, lam=0.5, universe=topics)
            if max(grid.values, key=grid.values.get) == "t05":
                hits += 1
        assert hits == 3

    def test_config_round_trip_from_json(self):
        obj = {
            "entities": 3, "topics": 4, "windows": 2, "base_rate": 10.0,
            "anomalies": [{"entity": "u01", "topic": "t01", "window": 1, "multiplier": 5.0}],
            "seed": 3,
        }
        cfg = ScenarioConfig.from_json_dict(obj)
        assert cfg.entities == 3
        assert cfg.anomalies[0].topic == "t01"
        with pytest.raises(ValueError, match="unknown scenario"):
            ScenarioConfig.from_json_dict({"bogus": 1})
