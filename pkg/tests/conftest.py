"""Shared fixtures and verification helpers."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from gridscope import PointCloud

sys.path.insert(0, str(Path(__file__).parent))


def random_cloud(n: int, dims: int, seed: int, spread: float = 1.0) -> PointCloud:
    rng = np.random.default_rng(seed)
    coords = rng.normal(0.0, spread, size=(n, dims))
    ids = tuple(f"p{i:04d}" for i in range(n))
    return PointCloud(ids, coords)


def balanced_sides(n: int, dims: int) -> tuple[int, ...]:
    """Test-side factorization of n into dims near-equal sides."""
    sides = []
    remaining = n
    for axes_left in range(dims, 0, -1):
        target = remaining ** (1.0 / axes_left)
        divisors = [d for d in range(1, remaining + 1) if remaining % d == 0]
        best = min(divisors, key=lambda d: (abs(d - target), d))
        sides.append(best)
        remaining //= best
    return tuple(sorted(sides, reverse=True))


def lattice_cloud(sides: tuple[int, ...], scales=None, ids=None) -> PointCloud:
    """A cloud whose coordinates are exactly the lattice cells, optionally
    scaled per axis."""
    dims = len(sides)
    cells = [tuple(int(c) for c in cell) for cell in np.ndindex(*sides)]
    coords = np.array(cells, dtype=float)
    if scales is not None:
        coords = coords * np.asarray(scales, dtype=float)
    if ids is None:
        ids = tuple(f"p{i:04d}" for i in range(len(cells)))
    return PointCloud(tuple(ids), coords), cells


def assert_bijection(assignment) -> None:
    cells = list(assignment.cells.values())
    assert len(set(cells)) == len(cells)
    assert set(cells) == set(
        tuple(int(c) for c in cell) for cell in np.ndindex(*assignment.shape.sides)
    )


def assert_recursive_sidedness(assignment) -> None:
    """Replay the recursion from the recorded paths: at every internal node
    the left subtree's final coordinates along the node's split axis must
    stay strictly below the right subtree's."""
    sides = assignment.shape.sides
    dims = len(sides)
    members: dict[str, dict[str, tuple[int, ...]]] = {}
    for pid, path in assignment.paths.items():
        for depth in range(len(path) + 1):
            members.setdefault(path[:depth], {})[pid] = assignment.cells[pid]

    stack = [("", [0] * dims, list(sides))]
    while stack:
        prefix, lo, hi = stack.pop()
        node = members.get(prefix)
        assert node is not None, f"no points under node {prefix!r}"
        if len(node) == 1:
            continue
        a = len(prefix) % dims
        for _ in range(dims):
            if hi[a] - lo[a] > 1:
                break
            a = (a + 1) % dims
        assert hi[a] - lo[a] > 1, f"node {prefix!r} cannot split"
        left = members.get(prefix + "L", {})
        right = members.get(prefix + "R", {})
        assert left and right, f"node {prefix!r} has an empty child"
        assert len(left) + len(right) == len(node)
        max_left = max(cell[a] for cell in left.values())
        min_right = min(cell[a] for cell in right.values())
        assert max_left < min_right, (
            f"sidedness violated at node {prefix!r} on axis {a}: {max_left} >= {min_right}"
        )
        mid = lo[a] + (hi[a] - lo[a]) // 2
        hi_left = list(hi)
        hi_left[a] = mid
        lo_right = list(lo)
        lo_right[a] = mid
        stack.append((prefix + "L", list(lo), hi_left))
        stack.append((prefix + "R", lo_right, list(hi)))


@pytest.fixture
def rng():
    return np.random.default_rng(20160814)
