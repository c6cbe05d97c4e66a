"""Capture real service responses into the UI test fixture.

Run from the repository root after installing the Python package:

    python frontend/scripts/capture_fixtures.py

Rewrites frontend/tests/fixtures/fixture_data.json with every payload the
UI tests serve through their mock fetch router, so the frontend is tested
against the actual wire format.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from gridscope import ScenarioConfig, classical_mds, pairwise_distances, synthesize
from gridscope.ingest import Anomaly
from gridscope.service import METRICS, build_dataset, create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "fixture_data.json"


def main() -> None:
    cfg = ScenarioConfig(
        entities=3, topics=16, windows=4, base_rate=40.0,
        anomalies=(Anomaly("u02", "t05", 3, 20.0),),
        vector_dim=16, clusters=4,
    )
    data = synthesize(cfg, seed=11)
    cloud = classical_mds(pairwise_distances(data.vectors, "euclidean"), 2)
    dataset = build_dataset(
        topics=data.topics, cloud=cloud, events=data.events, spec=data.window_spec, lam=0.5,
    )
    client = TestClient(create_app(dataset))

    def get(path: str, **params):
        response = client.get(path, params=params)
        response.raise_for_status()
        return response.json()

    entities = get("/api/entities")["entities"]
    windows = get("/api/windows")["windows"]
    topic_ids = [t.topic_id for t in dataset.topics]

    fixture = {
        "entities": get("/api/entities"),
        "windows": get("/api/windows"),
        "topics": {tid: get(f"/api/topics/{tid}") for tid in topic_ids},
        "grids": {
            entity: {
                str(w["index"]): {
                    metric: get("/api/grid", entity=entity, window=w["index"], metric=metric)
                    for metric in METRICS
                }
                for w in windows
            }
            for entity in entities
        },
        "details": {
            entity: {
                tid: get("/api/detail", entity=entity, window=0, topic=tid)
                for tid in topic_ids
            }
            for entity in entities
        },
        "timelines": {
            entity: {
                metric: {
                    fmt: get("/api/timeline", entity=entity, metric=metric, format=fmt)
                    for fmt in ("curtain", "shower")
                }
                for metric in METRICS
            }
            for entity in entities
        },
    }
    OUT.write_text(json.dumps(fixture, sort_keys=True), encoding="utf-8")
    print(f"wrote {OUT} ({OUT.stat().st_size // 1024} KiB)")


if __name__ == "__main__":
    main()
