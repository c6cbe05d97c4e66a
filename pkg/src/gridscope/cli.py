"""Command-line interface: layout, mds, metrics, pipeline, simulate, serve.

Exit codes: 0 success, 1 input error (bad files, mismatched sizes, unknown
ids, usage mistakes), 2 internal error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .core_sd import GridAssignment, GridShape, split_diffuse
from .embedding import (
    classical_mds,
    export_embedding,
    import_embedding,
    load_distance_matrix,
    pairwise_distances,
)
from .ingest import ScenarioConfig, WindowSpec, events_to_jsonl, parse_events, synthesize
from .metrics import score_layout
from .service import (
    ServiceConfig,
    build_dataset,
    create_app,
    load_dataset,
    pipeline_bundle,
)
from .topic_grids import load_topics, parse_rfc3339, save_topics

DATA_DIR_ENV = "GRIDSCOPE_DATA_DIR"


def parse_shape(text: str) -> GridShape:
    """Parse a shape flag like '8x8', '64', or '4x4x4'."""
    try:
        sides = tuple(int(part) for part in text.lower().replace(",", "x").split("x"))
    except ValueError:
        raise ValueError(f"invalid shape {text!r}; expected e.g. 8x8 or 4x4x4") from None
    return GridShape(sides)


def _write_or_echo(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


@click.group()
def cli():
    """Grid layout and topic-grid analytics tools."""


@cli.command()
@click.option("--in", "-i", "source", required=True, type=click.Path(), help="Embedding file (CSV id,x,y[,z] or JSON).")
@click.option("--shape", "shape_text", required=True, help="Lattice shape, e.g. 8x8; one side per embedding axis.")
@click.option("--out", "-o", default=None, type=click.Path(), help="Write the assignment JSON here instead of stdout.")
def layout(source, shape_text, out):
    """Map an embedding file onto an integer grid."""
    cloud = import_embedding(source)
    assignment = split_diffuse(cloud, parse_shape(shape_text))
    _write_or_echo(assignment.to_json(indent=2), out)


@cli.command()
@click.option("--distances", "-d", required=True, type=click.Path(), help="Distance matrix CSV (first row/column hold ids).")
@click.option("--dims", default=2, show_default=True, type=int, help="Target dimension (1-3).")
@click.option("--out", "-o", default=None, type=click.Path(), help="Write the embedding here instead of stdout.")
@click.option("--format", "fmt", default=None, type=click.Choice(["csv", "json"]), help="Output format; default follows the file suffix, csv on stdout.")
def mds(distances, dims, out, fmt):
    """Embed a distance matrix into 1-3 dimensions (classical scaling)."""
    cloud = classical_mds(load_distance_matrix(distances), dims)
    if out is None:
        import io

        header = ["id", "x", "y", "z"][: cloud.dims + 1]
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for pid, row in zip(cloud.ids, cloud.coords):
            buf.write(",".join([pid] + [repr(float(c)) for c in row]) + "\n")
        click.echo(buf.getvalue(), nl=False)
    else:
        export_embedding(cloud, out, fmt)


@cli.command()
@click.option("--embedding", "-e", required=True, type=click.Path(), help="Original embedding file.")
@click.option("--assignment", "-a", required=True, type=click.Path(), help="Assignment JSON produced by `layout`.")
@click.option("--radius", default=0.0, show_default=True, type=float, help="Overlap radius on the original cloud.")
@click.option("--bins", default=None, type=int, help="Bins per axis for density (default: round(n^(1/dims))).")
@click.option("--max-pairs", default=None, type=int, help="Subsample pair metrics beyond this many pairs.")
def metrics(embedding, assignment, radius, bins, max_pairs):
    """Score a layout: overlap, density heterogeneity, order agreement,
    distance correlation. Prints JSON, then an aligned table."""
    cloud = import_embedding(embedding)
    assign = GridAssignment.from_json_dict(json.loads(Path(assignment).read_text(encoding="utf-8")))
    score = score_layout(cloud, assign, radius=radius, bins_per_axis=bins, max_pairs=max_pairs)
    click.echo(score.to_json())
    click.echo("")
    click.echo(score.to_table())


@cli.command()
@click.option("--data-dir", default=None, type=click.Path(), help="Dataset directory (replaces the file/spec flags).")
@click.option("--events", default=None, type=click.Path(), help="Event file (JSONL or CSV).")
@click.option("--topics", default=None, type=click.Path(), help="Topic file (JSON list).")
@click.option("--embedding", default=None, type=click.Path(), help="Topic embedding file.")
@click.option("--origin", default=None, help="Window origin (RFC3339).")
@click.option("--width-hours", default=24.0, show_default=True, type=float, help="Window width in hours.")
@click.option("--window-count", default=None, type=int, help="Number of windows.")
@click.option("--entity", required=True, help="Entity id to analyze.")
@click.option("--window", "window_index", required=True, type=int, help="Window index to analyze.")
@click.option("--lam", default=None, type=float, help="Smoothing for distributions [default: 0.5].")
@click.option("--shape", "shape_text", default=None, help="Grid shape [default: balanced for the topic count].")
@click.option("--history-windows", default=None, type=int, help="Trailing history length [default: all prior windows].")
@click.option("--out", "-o", default=None, type=click.Path(), help="Write the bundle JSON here instead of stdout.")
def pipeline(data_dir, events, topics, embedding, origin, width_hours, window_count,
             entity, window_index, lam, shape_text, history_windows, out):
    """Produce the five-panel grid bundle (current, historical, self risk,
    peer activity, peer risk) for one entity and window."""
    if data_dir is not None:
        if any(v is not None for v in (events, topics, embedding, origin, window_count)):
            raise ValueError("--data-dir replaces --events/--topics/--embedding/--origin/--window-count")
        dataset = load_dataset(data_dir, lam=lam)
        if history_windows is not None or shape_text is not None:
            raise ValueError("--shape and --history-windows belong in the dataset.json of --data-dir")
    else:
        missing = [name for name, v in (("--events", events), ("--topics", topics),
                                        ("--embedding", embedding), ("--origin", origin),
                                        ("--window-count", window_count)) if v is None]
        if missing:
            raise ValueError(f"missing options: {', '.join(missing)} (or use --data-dir)")
        from datetime import timedelta

        spec = WindowSpec(origin=parse_rfc3339(origin), width=timedelta(hours=width_hours),
                          count=window_count)
        dataset = build_dataset(
            topics=load_topics(topics),
            cloud=import_embedding(embedding),
            events=parse_events(events),
            spec=spec,
            lam=0.5 if lam is None else lam,
            shape=parse_shape(shape_text) if shape_text else None,
            history_windows=history_windows,
        )
    bundle = pipeline_bundle(dataset, entity, window_index)
    _write_or_echo(json.dumps(bundle, indent=2, sort_keys=True), out)


@cli.command()
@click.option("--config", "-c", default=None, type=click.Path(), help="Scenario config JSON (see README); defaults apply if omitted.")
@click.option("--seed", default=None, type=int, help="Override the scenario seed.")
@click.option("--out-dir", "-o", required=True, type=click.Path(), help="Directory for the generated dataset.")
def simulate(config, seed, out_dir):
    """Generate a deterministic synthetic dataset (events, topics,
    embeddings, window spec), ready for `pipeline` and `serve`."""
    if config is not None:
        cfg_obj = json.loads(Path(config).read_text(encoding="utf-8"))
        scenario = ScenarioConfig.from_json_dict(cfg_obj)
    else:
        scenario = ScenarioConfig()
    data = synthesize(scenario, seed=seed)

    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "events.jsonl").write_text(events_to_jsonl(data.events), encoding="utf-8")
    save_topics(data.topics, root / "topics.json")

    cloud_2d = classical_mds(pairwise_distances(data.vectors, "euclidean"), 2)
    cloud_1d = classical_mds(pairwise_distances(data.vectors, "euclidean"), 1)
    export_embedding(cloud_2d, root / "embedding.csv")
    export_embedding(cloud_1d, root / "embedding_1d.csv")

    manifest = {
        "schema_version": 1,
        "window": data.window_spec.to_json_dict(),
        "shape": list(GridShape.balanced(len(data.topics), 2).sides),
        "lam": 0.5,
    }
    (root / "dataset.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    click.echo(json.dumps({
        "entities": len(data.entities),
        "topics": len(data.topics),
        "windows": data.window_spec.count,
        "events": len(data.events),
        "out_dir": str(root),
    }, sort_keys=True))


@cli.command()
@click.option("--data-dir", default=None, type=click.Path(), help=f"Dataset directory [env {DATA_DIR_ENV}].")
@click.option("--host", default=None, help="Bind address [default: 127.0.0.1].")
@click.option("--port", default=None, type=int, help="Bind port [default: 8787].")
@click.option("--lam", default=None, type=float, help="Smoothing override.")
@click.option("--cors", "cors_origins", multiple=True, help="Allowed CORS origin (repeatable).")
@click.option("--config", "-c", default=None, type=click.Path(), help="Service config JSON; flags override it.")
def serve(data_dir, host, port, lam, cors_origins, config):
    """Serve the dataset over the read-only JSON API."""
    overrides = {
        "data_dir": data_dir,
        "host": host,
        "port": port,
        "lam": lam,
        "cors_origins": tuple(cors_origins) or None,
    }
    if config is not None:
        cfg = ServiceConfig.from_json_file(config, **overrides)
    else:
        kwargs = {k: v for k, v in overrides.items() if v is not None}
        if "data_dir" not in kwargs:
            env_dir = os.environ.get(DATA_DIR_ENV)
            if not env_dir:
                raise ValueError(f"no data directory: pass --data-dir or set {DATA_DIR_ENV}")
            kwargs["data_dir"] = env_dir
        cfg = ServiceConfig(**kwargs)

    dataset = load_dataset(cfg.data_dir, lam=cfg.lam)
    app = create_app(dataset, cors_origins=cfg.cors_origins)
    import uvicorn

    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")


def main(argv: list[str] | None = None) -> None:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(130)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc!r}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
