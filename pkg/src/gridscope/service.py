"""Read-only JSON service backing the grid explorer UI.

A dataset directory (topics, events, embedding, window spec) is loaded
once into immutable state; every endpoint is a pure read over it, so
concurrent requests need no locking. Ingestion happens ahead of time via
the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .core_sd import GridAssignment, GridShape, PointCloud, sd_1d, split_diffuse
from .embedding import classical_mds, import_embedding, pairwise_distances
from .embedding import HighDimVectors
from .ingest import ActivityEvent, WindowSpec, parse_events
from .topic_grids import (
    ActivityProfile,
    RiskGrid,
    TopicInfo,
    build_topic_grid,
    load_topics,
    peer_baseline,
    peer_risk,
    self_risk,
    smoothed_distribution,
    topic_curtain,
    topic_shower,
)
from .ingest import window_profiles

__all__ = ["ServiceConfig", "Dataset", "load_dataset", "create_app", "SCHEMA_VERSION", "METRICS"]

SCHEMA_VERSION = 1
METRICS = ("current", "historical", "self_risk", "peer", "peer_risk")
TIME_FORMATS = ("curtain", "shower")


@dataclass(frozen=True)
class ServiceConfig:
    """Server settings; file fields come from an optional JSON config."""

    data_dir: Path
    host: str = "127.0.0.1"
    port: int = 8787
    lam: float | None = None
    cors_origins: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 < self.port < 65536:
            raise ValueError(f"invalid port {self.port}")
        data_dir = Path(self.data_dir)
        if not data_dir.is_dir():
            raise ValueError(f"data directory {data_dir} does not exist")
        object.__setattr__(self, "data_dir", data_dir)

    @classmethod
    def from_json_file(cls, path: str | Path, **overrides) -> "ServiceConfig":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {"data_dir", "host", "port", "lam", "cors_origins"}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValueError(f"unknown service config keys: {', '.join(unknown)}")
        kwargs: dict = {k: obj[k] for k in known if k in obj}
        if "cors_origins" in kwargs:
            kwargs["cors_origins"] = tuple(kwargs["cors_origins"])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        if "data_dir" not in kwargs:
            raise ValueError("no data directory configured")
        return cls(**kwargs)


@dataclass(frozen=True)
class Dataset:
    """Everything the endpoints read: topics on their fixed grid, windowed
    profiles, and per-(entity, topic, window) event tallies."""

    topics: tuple[TopicInfo, ...]
    cloud: PointCloud
    assignment: GridAssignment
    ranks: dict[str, int]
    spec: WindowSpec
    lam: float
    history_windows: int | None
    profiles: dict[tuple[str, int], ActivityProfile]
    entities: tuple[str, ...]
    event_tallies: dict[tuple[str, str, int], tuple[int, float]]

    @property
    def topic_ids(self) -> list[str]:
        return [t.topic_id for t in self.topics]

    def topic(self, topic_id: str) -> TopicInfo | None:
        for t in self.topics:
            if t.topic_id == topic_id:
                return t
        return None


def build_dataset(
    topics: Sequence[TopicInfo],
    cloud: PointCloud,
    events: Sequence[ActivityEvent],
    spec: WindowSpec,
    lam: float = 0.5,
    shape: GridShape | None = None,
    cloud_1d: PointCloud | None = None,
    history_windows: int | None = None,
) -> Dataset:
    """Assemble the immutable service state from loaded pieces."""
    point_ids = {t.point_id for t in topics}
    if point_ids != set(cloud.ids):
        raise ValueError("embedding ids and topic ids differ")
    if shape is None:
        shape = GridShape.balanced(cloud.n, cloud.dims)
    assignment = split_diffuse(cloud, shape)
    if any(t.point_id != t.topic_id for t in topics):
        # grids are keyed by topic id; translate the embedding's point ids
        remap = {t.point_id: t.topic_id for t in topics}
        assignment = GridAssignment(
            shape=assignment.shape,
            cells={remap[k]: v for k, v in assignment.cells.items()},
            paths={remap[k]: v for k, v in assignment.paths.items()},
        )

    if cloud_1d is None:
        if cloud.n == 1:
            ranks = {cloud.ids[0]: 0}
        else:
            coords_1d = classical_mds(pairwise_distances(
                HighDimVectors(cloud.ids, cloud.coords), "euclidean"), 1)
            ranks = sd_1d(zip(coords_1d.ids, coords_1d.coords[:, 0]))
    else:
        missing = point_ids - set(cloud_1d.ids)
        if missing:
            raise ValueError(f"1-D embedding is missing ids: {', '.join(sorted(missing))}")
        index = {pid: i for i, pid in enumerate(cloud_1d.ids)}
        ranks = sd_1d((pid, float(cloud_1d.coords[index[pid], 0])) for pid in sorted(point_ids))
    remap = {t.point_id: t.topic_id for t in topics}
    ranks = {remap[k]: v for k, v in ranks.items()}

    profile_list = window_profiles(events, spec)
    profiles = {}
    entities = []
    for p in profile_list:
        if p.entity_id not in entities:
            entities.append(p.entity_id)
        profiles[(p.entity_id, spec.index_of(p.window.start))] = p

    tallies: dict[tuple[str, str, int], tuple[int, float]] = {}
    for e in events:
        idx = spec.index_of(e.ts)
        if idx is None:
            continue
        key = (e.entity, e.topic, idx)
        count, weight = tallies.get(key, (0, 0.0))
        tallies[key] = (count + 1, weight + e.weight)

    return Dataset(
        topics=tuple(topics),
        cloud=cloud,
        assignment=assignment,
        ranks=ranks,
        spec=spec,
        lam=lam,
        history_windows=history_windows,
        profiles=profiles,
        entities=tuple(sorted(entities)),
        event_tallies=tallies,
    )


def load_dataset(data_dir: str | Path, lam: float | None = None) -> Dataset:
    """Load a dataset directory written by `gridscope simulate` (or by hand).

    Expects topics.json, events.jsonl (or .csv), embedding.csv|.json,
    dataset.json ({"window": {...}, optional "shape", "lam",
    "history_windows"}), and optionally embedding_1d.csv.
    """
    root = Path(data_dir)
    manifest_path = root / "dataset.json"
    if not manifest_path.is_file():
        raise ValueError(f"{root}: missing dataset.json")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    spec = WindowSpec.from_json_dict(manifest["window"])

    topics = load_topics(root / "topics.json")

    events_path = root / "events.jsonl"
    if not events_path.is_file() and (root / "events.csv").is_file():
        events_path = root / "events.csv"
    events = parse_events(events_path)

    embedding_path = root / "embedding.csv"
    if not embedding_path.is_file() and (root / "embedding.json").is_file():
        embedding_path = root / "embedding.json"
    cloud = import_embedding(embedding_path)

    cloud_1d = None
    if (root / "embedding_1d.csv").is_file():
        cloud_1d = import_embedding(root / "embedding_1d.csv")

    shape = GridShape(tuple(manifest["shape"])) if "shape" in manifest else None
    if lam is None:
        lam = float(manifest.get("lam", 0.5))
    history_windows = manifest.get("history_windows")
    if history_windows is not None:
        history_windows = int(history_windows)

    return build_dataset(
        topics, cloud, events, spec,
        lam=lam, shape=shape, cloud_1d=cloud_1d, history_windows=history_windows,
    )


# ---------------------------------------------------------------------------
# metric evaluation


def _profile(dataset: Dataset, entity: str, widx: int) -> ActivityProfile:
    profile = dataset.profiles.get((entity, widx))
    if profile is None:
        # entity exists (validated upstream) but has no profile map entry
        return ActivityProfile(entity_id=entity, window=dataset.spec.window(widx), weights={})
    return profile


def _history_range(dataset: Dataset, widx: int) -> range:
    first = 0
    if dataset.history_windows is not None:
        first = max(0, widx - dataset.history_windows)
    return range(first, widx)


def _pooled(profiles: Sequence[ActivityProfile]) -> dict[str, float]:
    pooled: dict[str, float] = {}
    for p in profiles:
        for t, w in p.weights.items():
            pooled[t] = pooled.get(t, 0.0) + w
    return pooled


def metric_values(
    dataset: Dataset, entity: str, widx: int, metric: str
) -> tuple[dict[str, float], dict[str, Mapping[str, float]], str | None]:
    """Per-topic values for one grid: (values, aux value maps, warning).

    Activity metrics carry the raw weights as `value` and the smoothed
    distribution (exactly what risk compares) as `value_norm`.
    """
    topics = dataset.topic_ids
    current = _profile(dataset, entity, widx)
    history = [_profile(dataset, entity, w) for w in _history_range(dataset, widx)]
    peers = [
        _profile(dataset, other, w)
        for other in dataset.entities
        if other != entity
        for w in _history_range(dataset, widx)
    ]

    if metric == "current":
        norm = smoothed_distribution(current.weights, dataset.lam, topics)
        return dict(current.weights), {"value_norm": norm}, None
    if metric == "historical":
        pooled = _pooled(history)
        norm = smoothed_distribution(pooled, dataset.lam, topics)
        return pooled, {"value_norm": norm}, ("no history" if not history else None)
    if metric == "self_risk":
        grid = self_risk(current, history, lam=dataset.lam, universe=topics)
        return dict(grid.values), {}, grid.warning
    if metric == "peer":
        pooled = _pooled(peers)
        if not peers:
            return {}, {"value_norm": {}}, "no peer activity"
        return pooled, {"value_norm": peer_baseline(peers, dataset.lam, topics)}, None
    if metric == "peer_risk":
        if not peers:
            zero = RiskGrid(
                entity_id=entity, window=dataset.spec.window(widx), kind="peer",
                values={t: 0.0 for t in topics}, warning="no peer activity: risk defaults to zero",
            )
            return dict(zero.values), {}, zero.warning
        grid = peer_risk(current, peers, lam=dataset.lam, universe=topics)
        return dict(grid.values), {}, grid.warning
    raise ValueError(f"unknown metric {metric!r}")


def grid_payload(dataset: Dataset, entity: str, widx: int, metric: str) -> dict:
    values, aux, warning = metric_values(dataset, entity, widx, metric)
    window = dataset.spec.window(widx)
    grid = build_topic_grid(
        dataset.assignment,
        dataset.topics,
        values,
        aux_values=aux,
        meta={
            "entity": entity,
            "window": {"index": widx, **window.to_json_dict()},
            "kind": metric,
        },
    )
    payload = grid.to_json_dict()
    payload["warning"] = warning
    return payload


def pipeline_bundle(dataset: Dataset, entity: str, widx: int) -> dict:
    """The five-panel bundle: one shared assignment, five value grids."""
    if entity not in dataset.entities:
        raise ValueError(f"unknown entity {entity!r}")
    if not 0 <= widx < dataset.spec.count:
        raise ValueError(f"unknown window {widx}; dataset has {dataset.spec.count}")
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "entity": entity,
        "window": {"index": widx, **dataset.spec.window(widx).to_json_dict()},
        "assignment": dataset.assignment.to_json_dict(),
    }
    for key, metric in (
        ("current", "current"),
        ("historical", "historical"),
        ("self_risk", "self_risk"),
        ("peer_activity", "peer"),
        ("peer_risk", "peer_risk"),
    ):
        bundle[key] = grid_payload(dataset, entity, widx, metric)
    return bundle


def timeline_payload(dataset: Dataset, entity: str, metric: str, fmt: str) -> dict:
    series = []
    for widx in range(dataset.spec.count):
        values, _, _ = metric_values(dataset, entity, widx, metric)
        series.append((dataset.spec.window(widx), values))
    if fmt == "curtain":
        rank_cloud = PointCloud(
            tuple(sorted(dataset.ranks)),
            [[float(dataset.ranks[t])] for t in sorted(dataset.ranks)],
        )
        stack = topic_curtain(dataset.topics, rank_cloud, series)
    else:
        stack = topic_shower(dataset.assignment, series)
    payload = stack.to_json_dict()
    payload["windows"] = [
        {"index": i, **w} for i, w in enumerate(payload["windows"])
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "entity": entity,
        "metric": metric,
        "format": fmt,
        **payload,
    }


# ---------------------------------------------------------------------------
# HTTP app


def _check_query(request: Request, allowed: set[str]) -> None:
    for name in request.query_params:
        if name not in allowed:
            raise HTTPException(status_code=400, detail=f"unknown query parameter: {name}")


def _require(request: Request, name: str) -> str:
    value = request.query_params.get(name)
    if value is None or value == "":
        raise HTTPException(status_code=400, detail=f"missing query parameter: {name}")
    return value


def _parse_window(dataset: Dataset, raw: str) -> int:
    try:
        widx = int(raw)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"malformed parameter window: {raw!r}") from None
    if not 0 <= widx < dataset.spec.count:
        raise HTTPException(status_code=404, detail=f"unknown window: {widx}")
    return widx


def _check_entity(dataset: Dataset, entity: str) -> str:
    if entity not in dataset.entities:
        raise HTTPException(status_code=404, detail=f"unknown entity: {entity}")
    return entity


def create_app(dataset: Dataset, cors_origins: Sequence[str] = ()) -> FastAPI:
    """FastAPI app over one immutable dataset."""
    app = FastAPI(title="gridscope")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    @app.exception_handler(HTTPException)
    async def _http_error(_request, exc: HTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"schema_version": SCHEMA_VERSION, "error": str(exc.detail)},
        )

    cached_grid = lru_cache(maxsize=1024)(
        lambda entity, widx, metric: grid_payload(dataset, entity, widx, metric)
    )
    cached_timeline = lru_cache(maxsize=256)(
        lambda entity, metric, fmt: timeline_payload(dataset, entity, metric, fmt)
    )

    @app.get("/api/entities")
    def entities(request: Request):
        _check_query(request, set())
        return {"schema_version": SCHEMA_VERSION, "entities": list(dataset.entities)}

    @app.get("/api/windows")
    def windows(request: Request):
        _check_query(request, set())
        return {
            "schema_version": SCHEMA_VERSION,
            "windows": [
                {"index": i, **dataset.spec.window(i).to_json_dict()}
                for i in range(dataset.spec.count)
            ],
        }

    @app.get("/api/topics/{topic_id}")
    def topic(topic_id: str, request: Request):
        _check_query(request, set())
        info = dataset.topic(topic_id)
        if info is None:
            raise HTTPException(status_code=404, detail=f"unknown topic: {topic_id}")
        return {
            "schema_version": SCHEMA_VERSION,
            "topic_id": info.topic_id,
            "keywords": list(info.keywords),
            "cell": list(dataset.assignment.cells[info.topic_id]),
            "rank": dataset.ranks[info.topic_id],
        }

    @app.get("/api/grid")
    def grid(request: Request):
        _check_query(request, {"entity", "window", "metric"})
        entity = _check_entity(dataset, _require(request, "entity"))
        widx = _parse_window(dataset, _require(request, "window"))
        metric = _require(request, "metric")
        if metric not in METRICS:
            raise HTTPException(
                status_code=400,
                detail=f"malformed parameter metric: {metric!r} (expected one of {', '.join(METRICS)})",
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "entity": entity,
            "window": {"index": widx, **dataset.spec.window(widx).to_json_dict()},
            "metric": metric,
            **cached_grid(entity, widx, metric),
        }

    @app.get("/api/detail")
    def detail(request: Request):
        _check_query(request, {"entity", "window", "topic"})
        entity = _check_entity(dataset, _require(request, "entity"))
        widx = _parse_window(dataset, _require(request, "window"))
        topic_id = _require(request, "topic")
        info = dataset.topic(topic_id)
        if info is None:
            raise HTTPException(status_code=404, detail=f"unknown topic: {topic_id}")
        per_window = []
        for i in range(dataset.spec.count):
            count, weight = dataset.event_tallies.get((entity, topic_id, i), (0, 0.0))
            per_window.append(
                {
                    "index": i,
                    **dataset.spec.window(i).to_json_dict(),
                    "count": count,
                    "weight": weight,
                }
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "entity": entity,
            "topic_id": topic_id,
            "keywords": list(info.keywords),
            "window": {"index": widx, **dataset.spec.window(widx).to_json_dict()},
            "windows": per_window,
        }

    @app.get("/api/timeline")
    def timeline(request: Request):
        _check_query(request, {"entity", "metric", "format"})
        entity = _check_entity(dataset, _require(request, "entity"))
        metric = _require(request, "metric")
        if metric not in METRICS:
            raise HTTPException(
                status_code=400,
                detail=f"malformed parameter metric: {metric!r} (expected one of {', '.join(METRICS)})",
            )
        fmt = _require(request, "format")
        if fmt not in TIME_FORMATS:
            raise HTTPException(
                status_code=400,
                detail=f"malformed parameter format: {fmt!r} (expected curtain or shower)",
            )
        return cached_timeline(entity, metric, fmt)

    return app
