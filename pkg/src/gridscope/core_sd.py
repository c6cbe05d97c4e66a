"""Split-diffuse grid layout.

Maps a cloud of embedded points bijectively onto an integer lattice by
recursive capacity-balanced median splitting: at each recursion node the
points are ordered along one axis and divided into two groups whose sizes
equal the cell counts of the two halves of the node's lattice box. Every
point ends up in its own cell, and within each split the left group's
final coordinates stay strictly below the right group's along the split
axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "PointCloud",
    "GridShape",
    "GridAssignment",
    "split_diffuse",
    "resolve_cell",
    "sd_1d",
]


@dataclass(frozen=True)
class PointCloud:
    """Points in the low-dimensional visualization space.

    ids are unique string tokens; coords is an (n, dims) float array with
    dims in {1, 2, 3} and no NaN/Inf entries.
    """

    ids: tuple[str, ...]
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError(f"coords must be 2-D (n, dims), got shape {coords.shape}")
        n, dims = coords.shape
        if n == 0:
            raise ValueError("point cloud is empty")
        if not 1 <= dims <= 3:
            raise ValueError(f"dims must be 1, 2 or 3, got {dims}")
        if len(self.ids) != n:
            raise ValueError(f"{len(self.ids)} ids for {n} coordinate rows")
        if len(set(self.ids)) != n:
            raise ValueError("point ids are not unique")
        if not np.isfinite(coords).all():
            bad = sorted(str(self.ids[i]) for i in np.flatnonzero(~np.isfinite(coords).all(axis=1)))
            raise ValueError(f"non-finite coordinates for ids: {', '.join(bad)}")
        coords.setflags(write=False)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dims(self) -> int:
        return self.coords.shape[1]

    @classmethod
    def from_points(cls, points: Iterable[tuple[str, Sequence[float]]]) -> "PointCloud":
        """Build from (id, coords) pairs."""
        pts = list(points)
        if not pts:
            raise ValueError("point cloud is empty")
        ids = tuple(str(p[0]) for p in pts)
        coords = np.array([list(p[1]) for p in pts], dtype=np.float64)
        if coords.ndim != 2:
            raise ValueError("coordinate vectors have inconsistent lengths")
        return cls(ids, coords)

    def coord_of(self, point_id: str) -> np.ndarray:
        return self.coords[self.ids.index(point_id)]


@dataclass(frozen=True)
class GridShape:
    """Target lattice, one positive side length per axis."""

    sides: tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        if not sides:
            raise ValueError("shape has no axes")
        if any(s < 1 for s in sides):
            raise ValueError(f"side lengths must be positive, got {sides}")
        object.__setattr__(self, "sides", sides)

    @property
    def dims(self) -> int:
        return len(self.sides)

    @property
    def volume(self) -> int:
        return math.prod(self.sides)

    def all_cells(self) -> set[tuple[int, ...]]:
        return set(np.ndindex(*self.sides))

    @classmethod
    def balanced(cls, n: int, dims: int) -> "GridShape":
        """A near-equal-sided lattice of exactly n cells, longest side first.

        Greedy: each axis takes the divisor of the remaining count closest
        to its geometric-mean share.
        """
        if n < 1:
            raise ValueError(f"cell count must be >= 1, got {n}")
        if not 1 <= dims <= 3:
            raise ValueError(f"dims must be 1, 2 or 3, got {dims}")
        sides = []
        remaining = n
        for axes_left in range(dims, 0, -1):
            target = remaining ** (1.0 / axes_left)
            best = min(
                (d for d in range(1, remaining + 1) if remaining % d == 0),
                key=lambda d: (abs(d - target), d),
            )
            sides.append(best)
            remaining //= best
        return cls(tuple(sorted(sides, reverse=True)))


# A split path is a string over {L, R}, one character per recursion level
# from the root to the point's leaf.
SplitPath = str


@dataclass(frozen=True)
class GridAssignment:
    """Bijection from point ids to lattice cells, with the split path that
    produced each cell."""

    shape: GridShape
    cells: dict[str, tuple[int, ...]]
    paths: dict[str, SplitPath] = field(default_factory=dict)

    def __post_init__(self):
        cells = {str(k): tuple(int(c) for c in v) for k, v in self.cells.items()}
        if len(cells) != self.shape.volume:
            raise ValueError(
                f"{len(cells)} cells assigned for a lattice of {self.shape.volume}"
            )
        if set(cells.values()) != self.shape.all_cells():
            raise ValueError("cell assignment is not a bijection onto the lattice")
        paths = {str(k): str(v) for k, v in self.paths.items()}
        if paths and set(paths) != set(cells):
            raise ValueError("paths and cells cover different id sets")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "paths", paths)

    @property
    def ids(self) -> set[str]:
        return set(self.cells)

    def to_json_dict(self) -> dict:
        return {
            "shape": list(self.shape.sides),
            "cells": {i: list(c) for i, c in sorted(self.cells.items())},
            "paths": dict(sorted(self.paths.items())),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "GridAssignment":
        return cls(
            shape=GridShape(tuple(obj["shape"])),
            cells={k: tuple(v) for k, v in obj["cells"].items()},
            paths=dict(obj.get("paths", {})),
        )


def _split_axis(lo: Sequence[int], hi: Sequence[int], depth: int) -> int:
    """Axis to split at this recursion depth: cycle depth mod dims, skipping
    axes whose box span is already 1."""
    dims = len(lo)
    a = depth % dims
    for _ in range(dims):
        if hi[a] - lo[a] > 1:
            return a
        a = (a + 1) % dims
    raise ValueError("no splittable axis: box is a single cell")


def _axis_key_tables(cloud: PointCloud) -> list[list[tuple]]:
    """Per split axis, a per-point sort key: coordinate along that axis,
    then the remaining coordinates in ascending axis order, then the rank
    of the point's id (ids break all ties, so the order is total)."""
    dims = cloud.dims
    id_rank = {pid: r for r, pid in enumerate(sorted(cloud.ids))}
    rows = cloud.coords.tolist()
    tables = []
    for a in range(dims):
        order = (a, *(j for j in range(dims) if j != a))
        tables.append(
            [tuple(row[j] for j in order) + (id_rank[pid],) for pid, row in zip(cloud.ids, rows)]
        )
    return tables


def split_diffuse(cloud: PointCloud, shape: GridShape) -> GridAssignment:
    """Place every point of the cloud in its own lattice cell.

    The lattice must have exactly one cell per point and one axis per
    coordinate dimension. The placement is deterministic: ties along the
    split axis are broken by the remaining coordinates and finally by id.

    Raises ValueError on size mismatch, dims mismatch, or (via PointCloud)
    non-finite coordinates.
    """
    if shape.dims != cloud.dims:
        raise ValueError(f"shape has {shape.dims} axes but cloud has {cloud.dims} dims")
    if shape.volume != cloud.n:
        raise ValueError(f"shape holds {shape.volume} cells but cloud has {cloud.n} points")

    keys = _axis_key_tables(cloud)
    cells: dict[str, tuple[int, ...]] = {}
    paths: dict[str, SplitPath] = {}

    def recurse(indices: list[int], lo: list[int], hi: list[int], depth: int, path: str):
        if len(indices) == 1:
            pid = cloud.ids[indices[0]]
            cells[pid] = tuple(lo)
            paths[pid] = path
            return
        a = _split_axis(lo, hi, depth)
        span = hi[a] - lo[a]
        left_span = span // 2
        # each axis column of the box holds volume/span cells
        left_capacity = (len(indices) // span) * left_span
        ordered = sorted(indices, key=keys[a].__getitem__)
        mid = lo[a] + left_span
        left_hi = list(hi)
        left_hi[a] = mid
        right_lo = list(lo)
        right_lo[a] = mid
        recurse(ordered[:left_capacity], list(lo), left_hi, depth + 1, path + "L")
        recurse(ordered[left_capacity:], right_lo, list(hi), depth + 1, path + "R")

    recurse(list(range(cloud.n)), [0] * shape.dims, list(shape.sides), 0, "")
    return GridAssignment(shape=shape, cells=cells, paths=paths)


def resolve_cell(path: SplitPath, shape: GridShape) -> tuple[int, ...]:
    """Replay the box-splitting recursion along a split path and return the
    single cell it reaches.

    For a 2^h x 2^h square this decodes, per axis, the binary number formed
    by the path characters at depths congruent to that axis (L=0, R=1,
    most significant first).
    """
    bad = set(path) - {"L", "R"}
    if bad:
        raise ValueError(f"path contains invalid characters: {sorted(bad)}")
    lo = [0] * shape.dims
    hi = list(shape.sides)
    volume = shape.volume
    for depth, step in enumerate(path):
        if volume == 1:
            raise ValueError(f"path {path!r} is longer than the recursion for shape {shape.sides}")
        a = _split_axis(lo, hi, depth)
        span = hi[a] - lo[a]
        left_span = span // 2
        if step == "L":
            hi[a] = lo[a] + left_span
            volume = (volume // span) * left_span
        else:
            lo[a] = lo[a] + left_span
            volume = (volume // span) * (span - left_span)
    if volume != 1:
        raise ValueError(f"path {path!r} stops at a box of {volume} cells, not a single cell")
    return tuple(lo)


def sd_1d(values: Iterable[tuple[str, float]]) -> dict[str, int]:
    """Rank values onto the integer line [0, n).

    Equivalent to split_diffuse on a one-dimensional cloud with shape [n]:
    the stable rank of each value, ties broken by id.
    """
    pairs = [(str(i), float(v)) for i, v in values]
    if not pairs:
        raise ValueError("no values to rank")
    bad = sorted(i for i, v in pairs if not math.isfinite(v))
    if bad:
        raise ValueError(f"non-finite values for ids: {', '.join(bad)}")
    ordered = sorted(pairs, key=lambda p: (p[1], p[0]))
    return {pid: rank for rank, (pid, _) in enumerate(ordered)}
