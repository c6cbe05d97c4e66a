"""Layout quality measures.

Quantifies what the raw embedding gets wrong (overlapping points, uneven
density) and how much of its structure a grid placement keeps (per-axis
order agreement, pairwise distance correlation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .core_sd import GridAssignment, PointCloud

__all__ = [
    "LayoutScore",
    "overlap_count",
    "density_heterogeneity",
    "topology_agreement",
    "geometry_correlation",
    "score_layout",
    "assignment_as_cloud",
]


@dataclass(frozen=True)
class LayoutScore:
    """Bundle of the four layout measures for one cloud/assignment pair."""

    overlap_pairs: int
    heterogeneity: float
    topology_agreement: float
    geometry_correlation: float | None

    def to_json_dict(self) -> dict:
        return {
            "overlap_pairs": self.overlap_pairs,
            "heterogeneity": self.heterogeneity,
            "topology_agreement": self.topology_agreement,
            "geometry_correlation": self.geometry_correlation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [
            ("overlap_pairs", str(self.overlap_pairs)),
            ("heterogeneity", f"{self.heterogeneity:.6f}"),
            ("topology_agreement", f"{self.topology_agreement:.6f}"),
            (
                "geometry_correlation",
                "undefined" if self.geometry_correlation is None else f"{self.geometry_correlation:.6f}",
            ),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def overlap_count(cloud: PointCloud, radius: float) -> int:
    """Number of unordered point pairs at Euclidean distance <= radius.

    radius 0 counts exactly coincident pairs.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if cloud.n < 2:
        return 0
    tree = cKDTree(cloud.coords)
    return len(tree.query_pairs(r=float(radius)))


def density_heterogeneity(cloud: PointCloud, bins_per_axis: int | Sequence[int]) -> float:
    """Coefficient of variation of per-bin point counts.

    Bins tile the cloud's bounding box uniformly, bins_per_axis per axis
    (a sequence gives each axis its own count). 0 means perfectly even
    occupancy. A degenerate bounding-box axis is widened by an
    epsilon-scale pad instead of failing.
    """
    if isinstance(bins_per_axis, (int, np.integer)):
        bins = [int(bins_per_axis)] * cloud.dims
    else:
        bins = [int(b) for b in bins_per_axis]
        if len(bins) != cloud.dims:
            raise ValueError(f"{len(bins)} bin counts for {cloud.dims} axes")
    if any(b < 1 for b in bins):
        raise ValueError(f"bins_per_axis must be >= 1, got {bins}")

    ranges = []
    for a in range(cloud.dims):
        lo = float(cloud.coords[:, a].min())
        hi = float(cloud.coords[:, a].max())
        if hi == lo:
            pad = max(abs(lo), 1.0) * np.finfo(np.float64).eps * 4
            hi = lo + pad
        ranges.append((lo, hi))

    counts, _ = np.histogramdd(cloud.coords, bins=bins, range=ranges)
    mean = counts.mean()
    return float(counts.std() / mean)


def _pair_indices(n: int, max_pairs: int | None, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangle pair indices, subsampled deterministically when the
    full set exceeds max_pairs."""
    iu, ju = np.triu_indices(n, k=1)
    if max_pairs is not None and iu.size > max_pairs:
        rng = np.random.default_rng(seed)
        keep = rng.choice(iu.size, size=max_pairs, replace=False)
        keep.sort()
        iu, ju = iu[keep], ju[keep]
    return iu, ju


def _aligned_arrays(original: PointCloud, assignment: GridAssignment) -> tuple[np.ndarray, np.ndarray]:
    if set(original.ids) != assignment.ids:
        raise ValueError("cloud and assignment have different id sets")
    order = sorted(range(original.n), key=lambda i: original.ids[i])
    ids = [original.ids[i] for i in order]
    orig = original.coords[order]
    cells = np.array([assignment.cells[pid] for pid in ids], dtype=np.float64)
    return orig, cells


def topology_agreement(
    original: PointCloud,
    assignment: GridAssignment,
    max_pairs: int | None = None,
    seed: int = 0,
) -> float:
    """Fraction of strictly ordered point pairs whose per-axis order the
    grid placement preserves.

    Counted over all pairs and all axes; pairs tied in the original along
    an axis are excluded, so an identity placement of a lattice scores 1.
    """
    orig, cells = _aligned_arrays(original, assignment)
    iu, ju = _pair_indices(orig.shape[0], max_pairs, seed)
    if iu.size == 0:
        return 1.0
    orig_sign = np.sign(orig[iu] - orig[ju])
    cell_sign = np.sign(cells[iu] - cells[ju])
    ordered = orig_sign != 0
    denom = int(ordered.sum())
    if denom == 0:
        return 1.0
    return float(((orig_sign == cell_sign) & ordered).sum() / denom)


def geometry_correlation(
    original: PointCloud,
    assignment: GridAssignment,
    max_pairs: int | None = None,
    seed: int = 0,
) -> float | None:
    """Pearson correlation between original and grid-cell pairwise
    Euclidean distances. None when either distance list has no variance.
    """
    orig, cells = _aligned_arrays(original, assignment)
    n = orig.shape[0]
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    if max_pairs is not None and n * (n - 1) // 2 > max_pairs:
        iu, ju = _pair_indices(n, max_pairs, seed)
        d_orig = np.linalg.norm(orig[iu] - orig[ju], axis=1)
        d_cell = np.linalg.norm(cells[iu] - cells[ju], axis=1)
    else:
        d_orig = pdist(orig)
        d_cell = pdist(cells)
    if d_orig.std() == 0.0 or d_cell.std() == 0.0:
        return None
    return float(np.corrcoef(d_orig, d_cell)[0, 1])


def assignment_as_cloud(assignment: GridAssignment) -> PointCloud:
    """The assigned cells themselves as a point cloud, for measuring the
    uniformity of the grid side."""
    ids = sorted(assignment.cells)
    return PointCloud(tuple(ids), np.array([assignment.cells[i] for i in ids], dtype=np.float64))


def score_layout(
    cloud: PointCloud,
    assignment: GridAssignment,
    radius: float = 0.0,
    bins_per_axis: int | Sequence[int] | None = None,
    max_pairs: int | None = None,
) -> LayoutScore:
    """All four measures for a cloud and its grid placement.

    overlap_pairs and heterogeneity describe the original cloud; by default
    the bin count per axis is round(n^(1/dims)) so a perfect grid scores 0.
    """
    if bins_per_axis is None:
        bins_per_axis = max(1, round(cloud.n ** (1.0 / cloud.dims)))
    return LayoutScore(
        overlap_pairs=overlap_count(cloud, radius),
        heterogeneity=density_heterogeneity(cloud, bins_per_axis),
        topology_agreement=topology_agreement(cloud, assignment, max_pairs=max_pairs),
        geometry_correlation=geometry_correlation(cloud, assignment, max_pairs=max_pairs),
    )
