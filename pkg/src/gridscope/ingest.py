"""Event ingestion and synthetic scenario generation.

Events arrive pre-topicized (one topic id per log entry); this module
turns them into per-entity, per-window activity profiles and can generate
deterministic synthetic datasets with planted anomalies for demos and
end-to-end tests.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Mapping, TextIO

import numpy as np

from .embedding import HighDimVectors
from .topic_grids import (
    ActivityProfile,
    TimeWindow,
    TopicInfo,
    format_rfc3339,
    parse_rfc3339,
)

__all__ = [
    "ActivityEvent",
    "WindowSpec",
    "ScenarioConfig",
    "SyntheticDataset",
    "parse_events",
    "events_to_jsonl",
    "window_profiles",
    "synthesize",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActivityEvent:
    """One topicized log entry."""

    ts: datetime
    entity: str
    topic: str
    weight: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight >= 0):
            raise ValueError(f"event weight must be finite and >= 0, got {self.weight}")

    def to_json_dict(self) -> dict:
        return {
            "ts": format_rfc3339(self.ts),
            "entity": self.entity,
            "topic": self.topic,
            "weight": self.weight,
        }


@dataclass(frozen=True)
class WindowSpec:
    """count contiguous half-open tumbling windows of equal width."""

    origin: datetime
    width: timedelta
    count: int

    def __post_init__(self):
        if self.width <= timedelta(0):
            raise ValueError(f"window width must be positive, got {self.width}")
        if self.count < 1:
            raise ValueError(f"window count must be >= 1, got {self.count}")

    @property
    def end(self) -> datetime:
        return self.origin + self.width * self.count

    def window(self, index: int) -> TimeWindow:
        if not 0 <= index < self.count:
            raise ValueError(f"window index {index} outside [0, {self.count})")
        return TimeWindow(self.origin + self.width * index, self.origin + self.width * (index + 1))

    def windows(self) -> list[TimeWindow]:
        return [self.window(i) for i in range(self.count)]

    def index_of(self, ts: datetime) -> int | None:
        """Window index holding ts, or None when out of range. A timestamp
        exactly on a boundary belongs to the later window."""
        if ts < self.origin or ts >= self.end:
            return None
        return int((ts - self.origin) // self.width)

    def to_json_dict(self) -> dict:
        return {
            "origin": format_rfc3339(self.origin),
            "width_seconds": self.width.total_seconds(),
            "count": self.count,
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "WindowSpec":
        if "width_seconds" in obj:
            width = timedelta(seconds=float(obj["width_seconds"]))
        elif "width_hours" in obj:
            width = timedelta(hours=float(obj["width_hours"]))
        else:
            raise ValueError("window spec needs width_seconds or width_hours")
        return cls(origin=parse_rfc3339(obj["origin"]), width=width, count=int(obj["count"]))


# ---------------------------------------------------------------------------
# parsing


def _event_from_fields(ts: str, entity: str, topic: str, weight: str | float | None) -> ActivityEvent:
    if not entity:
        raise ValueError("missing entity")
    if not topic:
        raise ValueError("missing topic")
    if weight is None or weight == "":
        w = 1.0
    else:
        try:
            w = float(weight)
        except (TypeError, ValueError):
            raise ValueError(f"invalid weight {weight!r}") from None
    if not (math.isfinite(w) and w >= 0):
        raise ValueError(f"weight must be finite and >= 0, got {w}")
    return ActivityEvent(ts=parse_rfc3339(ts), entity=str(entity), topic=str(topic), weight=w)


def _parse_jsonl(fh: TextIO, strict: bool) -> list[ActivityEvent]:
    events = []
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("line is not a JSON object")
            event = _event_from_fields(
                obj.get("ts", ""), obj.get("entity", ""), obj.get("topic", ""), obj.get("weight")
            )
        except (ValueError, KeyError) as exc:
            if strict:
                raise ValueError(f"line {lineno}: {exc}") from None
            logger.warning("skipping malformed event line %d: %s", lineno, exc)
            continue
        events.append(event)
    return events


def _parse_csv(fh: TextIO, strict: bool) -> list[ActivityEvent]:
    reader = csv.reader(fh)
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        return []
    if header[:3] != ["ts", "entity", "topic"]:
        raise ValueError("CSV header must be ts,entity,topic[,weight]")
    events = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        try:
            if len(row) < 3 or len(row) > 4:
                raise ValueError(f"expected 3 or 4 fields, got {len(row)}")
            weight = row[3] if len(row) == 4 else None
            event = _event_from_fields(row[0], row[1], row[2], weight)
        except ValueError as exc:
            if strict:
                raise ValueError(f"line {lineno}: {exc}") from None
            logger.warning("skipping malformed event line %d: %s", lineno, exc)
            continue
        events.append(event)
    return events


def parse_events(
    source: str | Path | TextIO, fmt: str | None = None, strict: bool = True
) -> list[ActivityEvent]:
    """Read events from a JSON-lines or CSV file, in input order.

    JSONL objects: {"ts": RFC3339, "entity": str, "topic": str,
    "weight": optional >= 0}; weight defaults to 1. In strict mode the
    first malformed line raises ValueError with its line number; lenient
    mode logs and skips.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if fmt is None:
            fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
        with path.open(encoding="utf-8", newline="") as fh:
            try:
                return _parse_csv(fh, strict) if fmt == "csv" else _parse_jsonl(fh, strict)
            except ValueError as exc:
                raise ValueError(f"{path}: {exc}") from None
    if fmt is None:
        fmt = "jsonl"
    return _parse_csv(source, strict) if fmt == "csv" else _parse_jsonl(source, strict)


def events_to_jsonl(events: Iterable[ActivityEvent]) -> str:
    buf = io.StringIO()
    for e in events:
        buf.write(json.dumps(e.to_json_dict(), sort_keys=True))
        buf.write("\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# windowing


def window_profiles(
    events: Iterable[ActivityEvent],
    spec: WindowSpec,
    entities: Iterable[str] | None = None,
) -> list[ActivityProfile]:
    """Aggregate events into one profile per entity per window.

    Weights sum per topic. Events outside the window range are dropped
    (and counted in the log); windows without events yield empty-weight
    profiles. With an entity filter, exactly those entities are profiled.
    Output is ordered by entity then window.
    """
    wanted = None if entities is None else {str(e) for e in entities}
    sums: dict[tuple[str, int], dict[str, float]] = {}
    seen: set[str] = set()
    dropped = 0
    for event in events:
        if wanted is not None and event.entity not in wanted:
            continue
        idx = spec.index_of(event.ts)
        if idx is None:
            dropped += 1
            continue
        seen.add(event.entity)
        weights = sums.setdefault((event.entity, idx), {})
        weights[event.topic] = weights.get(event.topic, 0.0) + event.weight
    if dropped:
        logger.info("dropped %d events outside the window range", dropped)

    entity_ids = sorted(wanted) if wanted is not None else sorted(seen)
    profiles = []
    for entity in entity_ids:
        for idx in range(spec.count):
            weights = sums.get((entity, idx), {})
            profiles.append(
                ActivityProfile(
                    entity_id=entity,
                    window=spec.window(idx),
                    weights={t: weights[t] for t in sorted(weights)},
                )
            )
    return profiles


# ---------------------------------------------------------------------------
# synthetic scenarios


_VOCABULARY = (
    "login", "logout", "vpn", "badge", "email", "wiki", "search", "download",
    "upload", "database", "query", "export", "report", "dashboard", "build",
    "deploy", "commit", "review", "ticket", "incident", "firewall", "proxy",
    "dns", "share", "print", "payroll", "invoice", "ledger", "contract",
    "meeting", "calendar", "chat", "video", "storage", "backup", "restore",
    "admin", "config", "patch", "scan", "alert", "archive", "license",
    "directory", "token", "key", "certificate", "session",
)


@dataclass(frozen=True)
class Anomaly:
    entity: str
    topic: str
    window: int
    multiplier: float

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "Anomaly":
        return cls(
            entity=str(obj["entity"]),
            topic=str(obj["topic"]),
            window=int(obj["window"]),
            multiplier=float(obj["multiplier"]),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Generator knobs; see README for the JSON schema."""

    entities: int = 6
    topics: int = 16
    windows: int = 6
    base_rate: float = 120.0
    anomalies: tuple[Anomaly, ...] = ()
    vector_dim: int = 32
    clusters: int = 4
    keywords_per_topic: int = 3
    origin: datetime = field(default_factory=lambda: parse_rfc3339("2016-01-01T00:00:00Z"))
    window_width: timedelta = field(default_factory=lambda: timedelta(hours=24))
    seed: int = 0

    def __post_init__(self):
        if min(self.entities, self.topics, self.windows) < 1:
            raise ValueError("entities, topics and windows must all be >= 1")
        if self.base_rate <= 0:
            raise ValueError(f"base_rate must be positive, got {self.base_rate}")

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "ScenarioConfig":
        known = {
            "entities", "topics", "windows", "base_rate", "anomalies", "vector_dim",
            "clusters", "keywords_per_topic", "origin", "window_hours", "seed",
        }
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValueError(f"unknown scenario config keys: {', '.join(unknown)}")
        kwargs: dict = {}
        for key in ("entities", "topics", "windows", "vector_dim", "clusters",
                    "keywords_per_topic", "seed"):
            if key in obj:
                kwargs[key] = int(obj[key])
        if "base_rate" in obj:
            kwargs["base_rate"] = float(obj["base_rate"])
        if "origin" in obj:
            kwargs["origin"] = parse_rfc3339(obj["origin"])
        if "window_hours" in obj:
            kwargs["window_width"] = timedelta(hours=float(obj["window_hours"]))
        if "anomalies" in obj:
            kwargs["anomalies"] = tuple(Anomaly.from_json_dict(a) for a in obj["anomalies"])
        return cls(**kwargs)

    def entity_ids(self) -> list[str]:
        return [f"u{i + 1:02d}" for i in range(self.entities)]

    def topic_ids(self) -> list[str]:
        return [f"t{i:02d}" for i in range(self.topics)]

    def window_spec(self) -> WindowSpec:
        return WindowSpec(origin=self.origin, width=self.window_width, count=self.windows)


@dataclass(frozen=True)
class SyntheticDataset:
    topics: tuple[TopicInfo, ...]
    vectors: HighDimVectors
    events: tuple[ActivityEvent, ...]
    window_spec: WindowSpec
    entities: tuple[str, ...]
    config: ScenarioConfig


def synthesize(config: ScenarioConfig, seed: int | None = None) -> SyntheticDataset:
    """Deterministic synthetic dataset with optional planted anomalies.

    Event counts per (entity, topic, window) are Poisson with mean
    base_rate, scaled by the anomaly multiplier where one is planted, so
    the expected weight of a planted triple is multiplier * base_rate.
    Topic vectors are drawn around cluster centers so the embedding has
    visible structure.
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    entity_ids = config.entity_ids()
    topic_ids = config.topic_ids()
    spec = config.window_spec()

    for a in config.anomalies:
        if a.entity not in entity_ids:
            raise ValueError(f"anomaly references unknown entity {a.entity!r}")
        if a.topic not in topic_ids:
            raise ValueError(f"anomaly references unknown topic {a.topic!r}")
        if not 0 <= a.window < config.windows:
            raise ValueError(f"anomaly references unknown window {a.window}")
        if a.multiplier < 0:
            raise ValueError(f"anomaly multiplier must be >= 0, got {a.multiplier}")

    # clustered topic vectors: centers far apart, members tight around them
    centers = rng.normal(0.0, 4.0, size=(config.clusters, config.vector_dim))
    assignment = rng.integers(0, config.clusters, size=config.topics)
    vectors = centers[assignment] + rng.normal(0.0, 0.5, size=(config.topics, config.vector_dim))

    n_keywords = min(config.keywords_per_topic, len(_VOCABULARY))
    topics = tuple(
        TopicInfo(
            topic_id=tid,
            keywords=tuple(
                _VOCABULARY[int(k)]
                for k in rng.choice(len(_VOCABULARY), size=n_keywords, replace=False)
            ),
        )
        for tid in topic_ids
    )

    multipliers = {(a.entity, a.topic, a.window): a.multiplier for a in config.anomalies}
    width_seconds = spec.width.total_seconds()
    events: list[ActivityEvent] = []
    for w in range(config.windows):
        start = spec.window(w).start
        for entity in entity_ids:
            for topic in topic_ids:
                rate = config.base_rate * multipliers.get((entity, topic, w), 1.0)
                count = int(rng.poisson(rate))
                if count == 0:
                    continue
                offsets = np.sort(rng.uniform(0.0, width_seconds, size=count))
                for off in offsets:
                    events.append(
                        ActivityEvent(
                            ts=start + timedelta(seconds=float(off)),
                            entity=entity,
                            topic=topic,
                            weight=1.0,
                        )
                    )
    events.sort(key=lambda e: (e.ts, e.entity, e.topic))
    return SyntheticDataset(
        topics=topics,
        vectors=HighDimVectors(tuple(topic_ids), vectors),
        events=tuple(events),
        window_spec=spec,
        entities=tuple(entity_ids),
        config=config,
    )
