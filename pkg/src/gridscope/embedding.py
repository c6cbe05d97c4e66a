"""Embedding front-end for the grid layout.

Pairwise distances, classical (double-centering) multidimensional scaling,
orthogonal Procrustes alignment, and import/export of embedding and
distance-matrix files. External embeddings (t-SNE, PCA, ...) are accepted
as files; only MDS is computed here.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core_sd import PointCloud

__all__ = [
    "DistanceMatrix",
    "HighDimVectors",
    "pairwise_distances",
    "classical_mds",
    "procrustes_align",
    "import_embedding",
    "export_embedding",
    "load_distance_matrix",
    "save_distance_matrix",
]

_SYM_TOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense symmetric matrix of nonnegative distances with a zero diagonal."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        n = len(self.ids)
        if v.shape != (n, n):
            raise ValueError(f"distance matrix shape {v.shape} does not match {n} ids")
        if len(set(self.ids)) != n:
            raise ValueError("distance matrix ids are not unique")
        if not np.isfinite(v).all():
            raise ValueError("distance matrix has non-finite entries")
        scale = max(1.0, float(np.abs(v).max()) if v.size else 1.0)
        if np.abs(v - v.T).max() > _SYM_TOL * scale:
            raise ValueError("distance matrix is not symmetric")
        if np.abs(np.diag(v)).max() > _SYM_TOL * scale:
            raise ValueError("distance matrix diagonal is not zero")
        if v.min() < -_SYM_TOL * scale:
            raise ValueError("distance matrix has negative entries")
        # normalize away float noise so downstream code can rely on the invariants
        v = np.maximum((v + v.T) / 2.0, 0.0)
        np.fill_diagonal(v, 0.0)
        v.setflags(write=False)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class HighDimVectors:
    """Rows of equal-length real vectors, e.g. topic vectors in keyword space."""

    ids: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError(f"vectors must be a nonempty 2-D array, got shape {v.shape}")
        if v.shape[0] != len(self.ids):
            raise ValueError(f"{len(self.ids)} ids for {v.shape[0]} vectors")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("vector ids are not unique")
        if not np.isfinite(v).all():
            raise ValueError("vectors have non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "vectors", v)


def pairwise_distances(v: HighDimVectors, metric: str = "euclidean") -> DistanceMatrix:
    """All-pairs distances between the input vectors.

    euclidean: L2 norm of the difference. cosine: 1 - cosine similarity,
    clamped to >= 0; rejects zero vectors.
    """
    x = v.vectors
    if x.shape[0] < 2:
        raise ValueError("need at least 2 vectors for pairwise distances")
    if metric == "euclidean":
        diff = x[:, None, :] - x[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    elif metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ValueError(
                f"cosine distance undefined for zero vectors: {', '.join(v.ids[i] for i in zero)}"
            )
        sim = (x @ x.T) / np.outer(norms, norms)
        d = np.maximum(1.0 - np.clip(sim, -1.0, 1.0), 0.0)
    else:
        raise ValueError(f"unknown metric {metric!r}, expected 'euclidean' or 'cosine'")
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(v.ids, d)


def _orient_axes(ids: tuple[str, ...], coords: np.ndarray) -> np.ndarray:
    """Fix the sign of each axis: the lexicographically smallest id among the
    points of largest absolute coordinate gets a nonnegative value."""
    out = coords.copy()
    for a in range(out.shape[1]):
        col = out[:, a]
        amax = np.abs(col).max()
        if amax == 0.0:
            continue
        anchor = min(np.flatnonzero(np.abs(col) == amax), key=lambda i: ids[i])
        if col[anchor] < 0.0:
            out[:, a] = -col
    return out


def classical_mds(
    d: DistanceMatrix, target_dims: int, return_eigenvalues: bool = False
):
    """Embed a distance matrix into 1-3 dimensions by double centering.

    B = -1/2 * J * D^2 * J with J = I - (1/n) 11^T; coordinates are the top
    eigenvectors of B scaled by the square roots of their (clamped)
    eigenvalues. The output is centered, and each axis is sign-oriented so
    repeated runs and permuted inputs agree.
    """
    if not 1 <= target_dims <= 3:
        raise ValueError(f"target_dims must be 1, 2 or 3, got {target_dims}")
    n = d.n
    if n <= target_dims:
        raise ValueError(f"need more than {target_dims} points, got {n}")

    d2 = d.values**2
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * (j @ d2 @ j)
    b = (b + b.T) / 2.0

    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]

    scale = max(1.0, float(np.abs(evals).max()))
    if evals.min() < -_SYM_TOL * scale:
        warnings.warn(
            "distance matrix is not Euclidean; negative eigenvalues clamped to zero",
            stacklevel=2,
        )
    clamped = np.maximum(evals, 0.0)
    if clamped[0] == 0.0:
        warnings.warn("degenerate distances: all points embed at the origin", stacklevel=2)

    coords = evecs[:, :target_dims] * np.sqrt(clamped[:target_dims])
    coords = coords - coords.mean(axis=0)
    coords = _orient_axes(d.ids, coords)
    cloud = PointCloud(d.ids, coords)
    if return_eigenvalues:
        return cloud, clamped
    return cloud


def procrustes_align(a: PointCloud, b: PointCloud) -> tuple[PointCloud, float]:
    """Optimally rotate/reflect/translate b onto a (no scaling).

    Returns the aligned copy of b and the root-mean-square residual of the
    per-point Euclidean distances.
    """
    if set(a.ids) != set(b.ids):
        raise ValueError("point clouds have different id sets")
    if a.dims != b.dims:
        raise ValueError(f"dims mismatch: {a.dims} vs {b.dims}")
    b_index = {pid: i for i, pid in enumerate(b.ids)}
    bmat = b.coords[[b_index[pid] for pid in a.ids]]

    a_mean = a.coords.mean(axis=0)
    b_mean = bmat.mean(axis=0)
    ac = a.coords - a_mean
    bc = bmat - b_mean
    u, _, vt = np.linalg.svd(bc.T @ ac)
    rotation = u @ vt
    aligned = bc @ rotation + a_mean
    rmse = float(np.sqrt(np.mean(np.sum((aligned - a.coords) ** 2, axis=1))))
    return PointCloud(a.ids, aligned), rmse


# ---------------------------------------------------------------------------
# file formats


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        return fmt
    return "json" if path.suffix.lower() == ".json" else "csv"


def import_embedding(source: str | Path, fmt: str | None = None) -> PointCloud:
    """Read an embedding file into a validated point cloud.

    CSV: header ``id,x,y[,z]``. JSON: ``{"dims": d, "points": [{"id": ...,
    "coords": [...]}]}``. Raises ValueError naming the offending row on
    malformed, non-finite, or duplicate entries.
    """
    path = Path(source)
    if _detect_format(path, fmt) == "json":
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
        dims = int(obj.get("dims", 0))
        points = []
        for k, rec in enumerate(obj.get("points", [])):
            coords = rec.get("coords")
            if "id" not in rec or coords is None:
                raise ValueError(f"{path}: point {k}: missing id or coords")
            if len(coords) != dims:
                raise ValueError(
                    f"{path}: point {k} ({rec['id']}): {len(coords)} coords, expected {dims}"
                )
            points.append((str(rec["id"]), [float(c) for c in coords]))
        return _build_cloud(points, str(path))

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip().lower() for h in header]
        if header not in (["id", "x"], ["id", "x", "y"], ["id", "x", "y", "z"]):
            raise ValueError(f"{path}: header must be id,x[,y[,z]], got {','.join(header)}")
        dims = len(header) - 1
        points = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != dims + 1:
                raise ValueError(f"{path}: line {lineno}: expected {dims + 1} fields, got {len(row)}")
            try:
                coords = [float(c) for c in row[1:]]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric coordinate") from None
            if not all(math.isfinite(c) for c in coords):
                raise ValueError(f"{path}: line {lineno}: non-finite coordinate for id {row[0]!r}")
            points.append((row[0], coords))
    return _build_cloud(points, str(path))


def _build_cloud(points: list[tuple[str, list[float]]], source: str) -> PointCloud:
    if not points:
        raise ValueError(f"{source}: no points")
    seen: set[str] = set()
    for pid, _ in points:
        if pid in seen:
            raise ValueError(f"{source}: duplicate id {pid!r}")
        seen.add(pid)
    for pid, coords in points:
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"{source}: non-finite coordinate for id {pid!r}")
    return PointCloud.from_points(points)


def export_embedding(cloud: PointCloud, target: str | Path, fmt: str | None = None) -> None:
    """Write a point cloud in a format import_embedding reads back exactly."""
    path = Path(target)
    if _detect_format(path, fmt) == "json":
        obj = {
            "dims": cloud.dims,
            "points": [
                {"id": pid, "coords": [float(c) for c in row]}
                for pid, row in zip(cloud.ids, cloud.coords)
            ],
        }
        path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
        return
    header = ["id", "x", "y", "z"][: cloud.dims + 1]
    lines = [",".join(header)]
    for pid, row in zip(cloud.ids, cloud.coords):
        lines.append(",".join([pid] + [repr(float(c)) for c in row]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_distance_matrix(source: str | Path) -> DistanceMatrix:
    """Read a distance matrix CSV whose first row and column hold the ids."""
    path = Path(source)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    ids = [c.strip() for c in rows[0][1:]]
    n = len(ids)
    if len(rows) != n + 1:
        raise ValueError(f"{path}: expected {n} data rows, got {len(rows) - 1}")
    values = np.zeros((n, n))
    for i, row in enumerate(rows[1:], start=0):
        if len(row) != n + 1:
            raise ValueError(f"{path}: line {i + 2}: expected {n + 1} fields, got {len(row)}")
        if row[0].strip() != ids[i]:
            raise ValueError(f"{path}: line {i + 2}: row id {row[0]!r} does not match column order")
        try:
            values[i] = [float(c) for c in row[1:]]
        except ValueError:
            raise ValueError(f"{path}: line {i + 2}: non-numeric distance") from None
    return DistanceMatrix(tuple(ids), values)


def save_distance_matrix(d: DistanceMatrix, target: str | Path) -> None:
    path = Path(target)
    lines = [",".join(["id"] + list(d.ids))]
    for pid, row in zip(d.ids, d.values):
        lines.append(",".join([pid] + [repr(float(c)) for c in row]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
