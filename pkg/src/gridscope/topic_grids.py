"""Topic grids: activity, risk, and time-stacked views on a fixed layout.

Topics live in grid cells chosen once by the layout algorithm; every
metric (current activity, history, self risk, peer risk) is a value map
rendered onto those same cells, so views stay comparable. Risk compares
an entity's current topic distribution against a baseline distribution:
its own pooled history (self) or the equal-weight mean of its peers'
distributions (peer).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core_sd import GridAssignment, GridShape, PointCloud, sd_1d

__all__ = [
    "TimeWindow",
    "TopicInfo",
    "ActivityProfile",
    "RiskGrid",
    "GridCell",
    "TopicGrid",
    "TimeStack",
    "normalize_profile",
    "normalize_weights",
    "smoothed_distribution",
    "self_risk",
    "peer_risk",
    "build_topic_grid",
    "topic_curtain",
    "topic_shower",
    "load_topics",
    "save_topics",
    "parse_rfc3339",
    "format_rfc3339",
]


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC3339 timestamp; naive times are taken as UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError:
        raise ValueError(f"invalid timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True, order=True)
class TimeWindow:
    """Half-open interval [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"window start {self.start} is not before end {self.end}")

    def overlaps(self, other: "TimeWindow") -> bool:
        return self.start < other.end and other.start < self.end

    def to_json_dict(self) -> dict:
        return {"start": format_rfc3339(self.start), "end": format_rfc3339(self.end)}


@dataclass(frozen=True)
class TopicInfo:
    """A topic and its ranked keywords, most relevant first.

    embedding_id names the topic's point in the embedding cloud; it
    defaults to the topic id. Keyword lists may repeat across topics.
    """

    topic_id: str
    keywords: tuple[str, ...]
    embedding_id: str | None = None

    def __post_init__(self):
        if not self.keywords:
            raise ValueError(f"topic {self.topic_id!r} has no keywords")
        object.__setattr__(self, "keywords", tuple(str(k) for k in self.keywords))
        object.__setattr__(self, "topic_id", str(self.topic_id))

    @property
    def point_id(self) -> str:
        return self.embedding_id if self.embedding_id is not None else self.topic_id

    def to_json_dict(self) -> dict:
        return {"topic_id": self.topic_id, "keywords": list(self.keywords)}


def load_topics(source: str | Path) -> list[TopicInfo]:
    """Read a topic file: a JSON list of {"topic_id": ..., "keywords": [...]}."""
    path = Path(source)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, list):
        raise ValueError(f"{path}: expected a JSON list of topics")
    topics = []
    for k, rec in enumerate(obj):
        if not isinstance(rec, dict) or "topic_id" not in rec or "keywords" not in rec:
            raise ValueError(f"{path}: topic {k}: needs topic_id and keywords")
        topics.append(TopicInfo(topic_id=str(rec["topic_id"]), keywords=tuple(rec["keywords"])))
    ids = [t.topic_id for t in topics]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate topic ids")
    if not topics:
        raise ValueError(f"{path}: no topics")
    return topics


def save_topics(topics: Sequence[TopicInfo], target: str | Path) -> None:
    path = Path(target)
    path.write_text(
        json.dumps([t.to_json_dict() for t in topics], indent=2) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class ActivityProfile:
    """Per-topic nonnegative activity weights of one entity in one window."""

    entity_id: str
    window: TimeWindow
    weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        weights = {str(t): float(w) for t, w in self.weights.items()}
        negative = sorted(t for t, w in weights.items() if w < 0)
        if negative:
            raise ValueError(f"negative weights for topics: {', '.join(negative)}")
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class RiskGrid:
    """Per-topic risk values in [0, 1) for one entity and window."""

    entity_id: str
    window: TimeWindow
    kind: str
    values: dict[str, float]
    warning: str | None = None

    def __post_init__(self):
        if self.kind not in ("self", "peer"):
            raise ValueError(f"kind must be 'self' or 'peer', got {self.kind!r}")
        values = {str(t): float(v) for t, v in self.values.items()}
        bad = sorted(t for t, v in values.items() if not 0.0 <= v < 1.0)
        if bad:
            raise ValueError(f"risk values outside [0, 1) for topics: {', '.join(bad)}")
        object.__setattr__(self, "values", values)


def normalize_profile(
    p: ActivityProfile, lam: float, universe: Iterable[str]
) -> dict[str, float]:
    """Smoothed distribution of the profile's weights over a topic universe.

    q_t = (w_t + lam) / (sum_T w + lam * |T|). Weights for topics outside
    the universe are ignored. With lam = 0 and zero total weight the
    uniform distribution is returned.
    """
    return normalize_weights(p.weights, lam, universe)


def normalize_weights(
    weights: Mapping[str, float], lam: float, universe: Iterable[str]
) -> dict[str, float]:
    topics = [str(t) for t in universe]
    if not topics:
        raise ValueError("empty topic universe")
    if len(set(topics)) != len(topics):
        raise ValueError("topic universe has duplicates")
    if lam < 0:
        raise ValueError(f"smoothing must be >= 0, got {lam}")
    total = sum(weights.get(t, 0.0) for t in topics) + lam * len(topics)
    if total == 0.0:
        return {t: 1.0 / len(topics) for t in topics}
    return {t: (weights.get(t, 0.0) + lam) / total for t in topics}


def smoothed_distribution(
    weights: Mapping[str, float], lam: float, universe: Iterable[str]
) -> dict[str, float]:
    """Weights scaled to unit mass, then smoothed toward uniform.

    This is what risk comparisons use: shrinking shares rather than raw
    weights keeps the result independent of activity volume, so scaling
    every weight by a constant changes nothing. An all-zero profile comes
    out uniform.
    """
    topics = [str(t) for t in universe]
    total = sum(weights.get(t, 0.0) for t in topics)
    if total > 0.0:
        shares = {t: weights.get(t, 0.0) / total for t in topics}
    else:
        shares = {}
    return normalize_weights(shares, lam, topics)


def _excess_risk(c: float, b: float, topic: str) -> float:
    # one-sided relative excess, squashed into [0, 1)
    if c <= b:
        return 0.0
    if b == 0.0:
        raise ValueError(
            f"baseline share for topic {topic!r} is 0; use smoothing lam > 0 for bounded risk"
        )
    delta = (c - b) / b
    return delta / (1.0 + delta)


def _risk_values(
    current: ActivityProfile,
    current_dist: Mapping[str, float],
    baseline_dist: Mapping[str, float],
    universe: Sequence[str],
) -> dict[str, float]:
    # with any current activity at all, untouched topics never flag; a
    # fully idle window is compared as the uniform distribution instead
    total = sum(current.weights.get(t, 0.0) for t in universe)
    values = {}
    for t in universe:
        if total > 0.0 and current.weights.get(t, 0.0) == 0.0:
            values[t] = 0.0
        else:
            values[t] = _excess_risk(current_dist[t], baseline_dist[t], t)
    return values


def _default_universe(*profile_groups: Iterable[ActivityProfile]) -> list[str]:
    topics: set[str] = set()
    for group in profile_groups:
        for p in group:
            topics.update(p.weights)
    return sorted(topics)


def _check_history_windows(current: ActivityProfile, history: Sequence[ActivityProfile]) -> None:
    for h in history:
        if h.entity_id != current.entity_id:
            raise ValueError(
                f"history profile for entity {h.entity_id!r} does not match {current.entity_id!r}"
            )
        if h.window.overlaps(current.window):
            raise ValueError("history window overlaps the current window")
        if h.window.start >= current.window.end:
            raise ValueError("history window does not precede the current window")
    ordered = sorted(history, key=lambda p: p.window)
    for prev, nxt in zip(ordered, ordered[1:]):
        if prev.window.overlaps(nxt.window):
            raise ValueError("history windows overlap each other")


def self_risk(
    current: ActivityProfile,
    history: Sequence[ActivityProfile],
    lam: float = 0.5,
    universe: Iterable[str] | None = None,
) -> RiskGrid:
    """Risk of the current window against the entity's own pooled history.

    History weights are summed across windows (one process, volume
    weighted) before being turned into a smoothed share distribution, so
    scaling either side's volume changes nothing. With no history at all
    the risk is zero everywhere and the grid carries a warning.
    """
    history = list(history)
    _check_history_windows(current, history)
    topics = list(universe) if universe is not None else _default_universe([current], history)
    if not history:
        return RiskGrid(
            entity_id=current.entity_id,
            window=current.window,
            kind="self",
            values={t: 0.0 for t in topics},
            warning="no history: risk defaults to zero",
        )
    pooled: dict[str, float] = {}
    for h in history:
        for t, w in h.weights.items():
            pooled[t] = pooled.get(t, 0.0) + w
    baseline = smoothed_distribution(pooled, lam, topics)
    current_dist = smoothed_distribution(current.weights, lam, topics)
    return RiskGrid(
        entity_id=current.entity_id,
        window=current.window,
        kind="self",
        values=_risk_values(current, current_dist, baseline, topics),
    )


def peer_baseline(
    peers: Sequence[ActivityProfile], lam: float, universe: Sequence[str]
) -> dict[str, float]:
    """Equal-weight mean of per-peer smoothed share distributions.

    Each peer entity's profiles are pooled, normalized, then averaged, so
    a high-volume peer counts no more than a quiet one.
    """
    by_entity: dict[str, dict[str, float]] = {}
    for p in peers:
        pooled = by_entity.setdefault(p.entity_id, {})
        for t, w in p.weights.items():
            pooled[t] = pooled.get(t, 0.0) + w
    dists = [smoothed_distribution(pooled, lam, universe) for _, pooled in sorted(by_entity.items())]
    k = len(dists)
    return {t: sum(d[t] for d in dists) / k for t in universe}


def peer_risk(
    current: ActivityProfile,
    peers: Sequence[ActivityProfile],
    lam: float = 0.5,
    universe: Iterable[str] | None = None,
) -> RiskGrid:
    """Risk of the current window against the peers' baseline distribution."""
    peers = list(peers)
    if not peers:
        raise ValueError("peer set is empty")
    offenders = sorted({p.entity_id for p in peers if p.entity_id == current.entity_id})
    if offenders:
        raise ValueError(f"entity {current.entity_id!r} is present among its own peers")
    topics = list(universe) if universe is not None else _default_universe([current], peers)
    baseline = peer_baseline(peers, lam, topics)
    current_dist = smoothed_distribution(current.weights, lam, topics)
    return RiskGrid(
        entity_id=current.entity_id,
        window=current.window,
        kind="peer",
        values=_risk_values(current, current_dist, baseline, topics),
    )


# ---------------------------------------------------------------------------
# renderable grids


@dataclass(frozen=True)
class GridCell:
    pos: tuple[int, ...]
    topic_id: str
    keyword: str
    keywords: tuple[str, ...]
    value: float
    extras: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        axes = ("x", "y", "z")
        out: dict = {axes[i]: int(c) for i, c in enumerate(self.pos)}
        out.update(
            topic_id=self.topic_id,
            keyword=self.keyword,
            keywords=list(self.keywords),
            value=self.value,
        )
        out.update(self.extras)
        return out


@dataclass(frozen=True)
class TopicGrid:
    shape: GridShape
    cells: tuple[GridCell, ...]
    meta: dict | None = None

    def to_json_dict(self) -> dict:
        out = {"shape": list(self.shape.sides), "cells": [c.to_json_dict() for c in self.cells]}
        if self.meta is not None:
            out["meta"] = self.meta
        return out


def build_topic_grid(
    assignment: GridAssignment,
    topics: Sequence[TopicInfo],
    values: Mapping[str, float],
    aux_values: Mapping[str, Mapping[str, float]] | None = None,
    meta: dict | None = None,
) -> TopicGrid:
    """Lay a value map onto the fixed topic cells.

    Topics missing from the value map render as 0; value keys outside the
    topic set are rejected. aux_values adds extra named per-cell fields
    (same missing-as-0 rule). Cell geometry depends only on the
    assignment, never on the values.
    """
    by_id = {t.topic_id: t for t in topics}
    if len(by_id) != len(topics):
        raise ValueError("duplicate topic ids")
    if set(by_id) != set(assignment.cells):
        raise ValueError("assignment ids and topic ids differ")
    unknown = sorted(set(values) - set(by_id))
    if unknown:
        raise ValueError(f"unknown topic ids in values: {', '.join(unknown)}")
    for name, vmap in (aux_values or {}).items():
        unknown = sorted(set(vmap) - set(by_id))
        if unknown:
            raise ValueError(f"unknown topic ids in {name}: {', '.join(unknown)}")

    cells = []
    for topic_id, pos in sorted(assignment.cells.items(), key=lambda kv: kv[1]):
        topic = by_id[topic_id]
        extras = {
            name: float(vmap.get(topic_id, 0.0)) for name, vmap in (aux_values or {}).items()
        }
        cells.append(
            GridCell(
                pos=pos,
                topic_id=topic_id,
                keyword=topic.keywords[0],
                keywords=topic.keywords,
                value=float(values.get(topic_id, 0.0)),
                extras=extras,
            )
        )
    return TopicGrid(shape=assignment.shape, cells=tuple(cells), meta=meta)


# ---------------------------------------------------------------------------
# time formats


@dataclass(frozen=True)
class TimeStack:
    """Ordered per-window value layers over one fixed topic placement.

    curtain: topics on a 1-D rank axis, time on the other. shower: a pile
    of full 2-D grids in time order.
    """

    axis: str
    windows: tuple[TimeWindow, ...]
    values: tuple[dict[str, float], ...]
    placement: dict[str, int] | dict[str, tuple[int, ...]]
    shape: GridShape

    def __post_init__(self):
        if self.axis not in ("curtain", "shower"):
            raise ValueError(f"axis must be 'curtain' or 'shower', got {self.axis!r}")
        if len(self.windows) != len(self.values):
            raise ValueError("one value map per window required")
        for prev, nxt in zip(self.windows, self.windows[1:]):
            if nxt.start <= prev.start:
                raise ValueError("windows are not strictly increasing")
        if self.axis == "curtain":
            ranks = sorted(self.placement.values())
            if ranks != list(range(len(self.placement))):
                raise ValueError("curtain placement is not a permutation of ranks")
        else:
            if set(self.placement.values()) != self.shape.all_cells():
                raise ValueError("shower placement is not a bijection onto the lattice")

    def to_json_dict(self) -> dict:
        if self.axis == "curtain":
            placement = {t: int(r) for t, r in sorted(self.placement.items())}
        else:
            placement = {t: list(c) for t, c in sorted(self.placement.items())}
        return {
            "axis": self.axis,
            "windows": [w.to_json_dict() for w in self.windows],
            "values": [
                {t: v for t, v in sorted(layer.items())} for layer in self.values
            ],
            "placement": placement,
            "shape": list(self.shape.sides),
        }


def _check_series_topics(
    series: Sequence[tuple[TimeWindow, Mapping[str, float]]], known: set[str], what: str
) -> None:
    for window, vmap in series:
        unknown = sorted(set(vmap) - known)
        if unknown:
            raise ValueError(
                f"unknown topic ids in values for window starting {format_rfc3339(window.start)}: "
                f"{', '.join(unknown)} ({what})"
            )


def topic_curtain(
    topics: Sequence[TopicInfo],
    embedding1d: PointCloud,
    series: Sequence[tuple[TimeWindow, Mapping[str, float]]],
) -> TimeStack:
    """Stack per-window values over a 1-D rank placement of the topics.

    The rank order comes from the 1-D embedding coordinates, ties broken
    by id, so nearby topics stay adjacent columns.
    """
    if embedding1d.dims != 1:
        raise ValueError(f"curtain embedding must be 1-D, got {embedding1d.dims} dims")
    topic_ids = [t.topic_id for t in topics]
    if len(set(topic_ids)) != len(topic_ids):
        raise ValueError("duplicate topic ids")
    have = dict(zip(embedding1d.ids, embedding1d.coords[:, 0]))
    missing = sorted(t.topic_id for t in topics if t.point_id not in have)
    if missing:
        raise ValueError(f"topics missing from the 1-D embedding: {', '.join(missing)}")
    _check_series_topics(series, set(topic_ids), "curtain")
    ranks = sd_1d((t.topic_id, float(have[t.point_id])) for t in topics)
    return TimeStack(
        axis="curtain",
        windows=tuple(w for w, _ in series),
        values=tuple({str(t): float(v) for t, v in vmap.items()} for _, vmap in series),
        placement=ranks,
        shape=GridShape((len(topic_ids),)),
    )


def topic_shower(
    assignment: GridAssignment,
    series: Sequence[tuple[TimeWindow, Mapping[str, float]]],
) -> TimeStack:
    """Pile per-window 2-D grids along the time axis; every layer shares
    the assignment's cell placement."""
    _check_series_topics(series, set(assignment.cells), "shower")
    return TimeStack(
        axis="shower",
        windows=tuple(w for w, _ in series),
        values=tuple({str(t): float(v) for t, v in vmap.items()} for _, vmap in series),
        placement=dict(assignment.cells),
        shape=assignment.shape,
    )
