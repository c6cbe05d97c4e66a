"""Distances, classical scaling, Procrustes, and file round trips."""

import math

import numpy as np
import pytest

from gridscope import (
    DistanceMatrix,
    HighDimVectors,
    PointCloud,
    classical_mds,
    export_embedding,
    import_embedding,
    pairwise_distances,
    procrustes_align,
)
from gridscope.embedding import load_distance_matrix, save_distance_matrix

from conftest import random_cloud


def brute_force_distances(coords) -> np.ndarray:
    """Independent O(n^2 d) loop, used as the oracle for planted configs."""
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = math.sqrt(sum((coords[i, k] - coords[j, k]) ** 2 for k in range(coords.shape[1])))
    return out


class TestPairwiseDistances:
    def test_3_4_5_triangle(self):
        v = HighDimVectors(("a", "b"), [[0.0, 0.0], [3.0, 4.0]])
        d = pairwise_distances(v, "euclidean")
        assert d.values[0, 1] == pytest.approx(5.0, abs=1e-12)
        assert d.values[1, 0] == pytest.approx(5.0, abs=1e-12)

    def test_identical_vectors_zero_matrix(self):
        v = HighDimVectors(("a", "b", "c"), np.ones((3, 4)))
        assert np.all(pairwise_distances(v, "euclidean").values == 0.0)

    def test_cosine_orthogonal_unit_vectors(self):
        v = HighDimVectors(("a", "b"), [[1.0, 0.0], [0.0, 1.0]])
        d = pairwise_distances(v, "cosine")
        assert d.values[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_cosine_zero_vector_rejected(self):
        v = HighDimVectors(("a", "b"), [[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="zero vector"):
            pairwise_distances(v, "cosine")

    def test_unknown_metric(self):
        v = HighDimVectors(("a", "b"), [[0.0], [1.0]])
        with pytest.raises(ValueError, match="metric"):
            pairwise_distances(v, "manhattan")

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            HighDimVectors(("a", "b"), [[0.0, 1.0], [1.0]])

    def test_matches_brute_force(self, rng):
        coords = rng.normal(size=(10, 6))
        v = HighDimVectors(tuple(f"v{i}" for i in range(10)), coords)
        got = pairwise_distances(v, "euclidean").values
        np.testing.assert_allclose(got, brute_force_distances(coords), atol=1e-12)


class TestDistanceMatrix:
    def test_asymmetry_rejected(self):
        bad = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError, match="symmetric"):
            DistanceMatrix(("a", "b"), bad)

    def test_nonzero_diagonal_rejected(self):
        bad = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="diagonal"):
            DistanceMatrix(("a", "b"), bad)

    def test_negative_entries_rejected(self):
        bad = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(ValueError, match="negative"):
            DistanceMatrix(("a", "b"), bad)


class TestClassicalMds:
    def test_collinear_three_points(self):
        # double centering of D^2 for distances (1, 1, 2) gives
        # B = [[1,0,-1],[0,0,0],[-1,0,1]]: eigenvalue 2 on (1,0,-1)/sqrt(2),
        # so the line embeds at (-1, 0, 1) up to global sign
        d2 = np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]])
        n = 3
        b_oracle = np.zeros((n, n))
        row = d2.mean(axis=1)
        grand = d2.mean()
        for i in range(n):
            for j in range(n):
                b_oracle[i, j] = -0.5 * (d2[i, j] - row[i] - row[j] + grand)
        np.testing.assert_allclose(
            b_oracle, [[1.0, 0.0, -1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 1.0]], atol=1e-12
        )

        d = DistanceMatrix(("a", "b", "c"), np.sqrt(d2))
        cloud = classical_mds(d, 1)
        got = cloud.coords[:, 0]
        # sign rule: the largest-|coordinate| point with the lowest id ("a")
        # comes out nonnegative
        np.testing.assert_allclose(got, [1.0, 0.0, -1.0], atol=1e-9)

    @pytest.mark.parametrize("dims", [2, 3])
    @pytest.mark.parametrize("n", [8, 32, 64])
    def test_recovers_planted_configuration(self, n, dims):
        planted = random_cloud(n, dims, seed=n * 7 + dims, spread=3.0)
        d = DistanceMatrix(planted.ids, brute_force_distances(planted.coords))
        embedded = classical_mds(d, dims)
        _, rmse = procrustes_align(planted, embedded)
        assert rmse <= 1e-6

    def test_identical_points_embed_at_origin(self):
        d = DistanceMatrix(("a", "b", "c", "d"), np.zeros((4, 4)))
        with pytest.warns(UserWarning, match="degenerate"):
            cloud = classical_mds(d, 2)
        assert np.all(cloud.coords == 0.0)

    def test_output_is_centered(self):
        planted = random_cloud(20, 2, seed=5, spread=2.0)
        d = DistanceMatrix(planted.ids, brute_force_distances(planted.coords + 13.0))
        cloud = classical_mds(d, 2)
        assert np.abs(cloud.coords.mean(axis=0)).max() <= 1e-9

    def test_eigenvalues_clamped_and_descending(self):
        planted = random_cloud(12, 2, seed=2)
        d = DistanceMatrix(planted.ids, brute_force_distances(planted.coords))
        _, evals = classical_mds(d, 2, return_eigenvalues=True)
        assert np.all(evals >= 0.0)
        assert np.all(np.diff(evals) <= 1e-12)

    def test_non_euclidean_distances_warn(self):
        # d(a,c) > d(a,b) + d(b,c) cannot come from any Euclidean
        # configuration, so the centered matrix has a negative eigenvalue
        d = DistanceMatrix(
            ("a", "b", "c"),
            np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 1.0], [10.0, 1.0, 0.0]]),
        )
        with pytest.warns(UserWarning, match="clamped"):
            classical_mds(d, 2)

    def test_round_trip_distances(self):
        planted = random_cloud(16, 2, seed=8, spread=2.0)
        original = brute_force_distances(planted.coords)
        cloud = classical_mds(DistanceMatrix(planted.ids, original), 2)
        again = brute_force_distances(cloud.coords)
        assert np.abs(again - original).max() <= 1e-6

    def test_deterministic_across_runs_and_permutation(self):
        planted = random_cloud(15, 2, seed=21, spread=2.0)
        d = brute_force_distances(planted.coords)
        first = classical_mds(DistanceMatrix(planted.ids, d), 2)
        second = classical_mds(DistanceMatrix(planted.ids, d), 2)
        np.testing.assert_array_equal(first.coords, second.coords)

        perm = np.random.default_rng(0).permutation(planted.n)
        permuted = classical_mds(
            DistanceMatrix(tuple(planted.ids[i] for i in perm), d[np.ix_(perm, perm)]), 2
        )
        by_id = {pid: permuted.coords[i] for i, pid in enumerate(permuted.ids)}
        for i, pid in enumerate(first.ids):
            np.testing.assert_allclose(first.coords[i], by_id[pid], atol=1e-8)

    def test_too_few_points(self):
        d = DistanceMatrix(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(ValueError, match="more than"):
            classical_mds(d, 2)


class TestProcrustes:
    def test_exact_rotation_recovered(self):
        a = random_cloud(10, 2, seed=4)
        theta = np.pi / 2
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        b = PointCloud(a.ids, a.coords @ rot)
        _, rmse = procrustes_align(a, b)
        assert rmse <= 1e-9

    def test_identity(self):
        a = random_cloud(6, 3, seed=1)
        aligned, rmse = procrustes_align(a, a)
        assert rmse == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(aligned.coords, a.coords, atol=1e-12)

    def test_displaced_corner_matches_grid_oracle(self):
        # frozen from a brute-force sweep over 2M rotation/reflection angles
        # with centroid translation; the identity-alignment closed form
        # (0.1 / sqrt(4) = 0.05) is an upper bound
        a = PointCloud(
            ("p0", "p1", "p2", "p3"),
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        moved = np.array(a.coords)
        moved[0] = (0.1, 0.0)
        b = PointCloud(a.ids, moved)
        _, rmse = procrustes_align(a, b)
        assert rmse == pytest.approx(0.03942765328347724, abs=1e-9)
        assert rmse <= 0.05 + 1e-12

    def test_arbitrary_orthogonal_transform_and_translation(self, rng):
        for dims in (1, 2, 3):
            a = random_cloud(12, dims, seed=dims)
            q, _ = np.linalg.qr(rng.normal(size=(dims, dims)))
            t = rng.normal(size=dims) * 5
            b = PointCloud(a.ids, a.coords @ q + t)
            _, rmse = procrustes_align(a, b)
            assert rmse <= 1e-9

    def test_alignment_matches_by_id_not_order(self):
        a = random_cloud(8, 2, seed=12)
        perm = np.random.default_rng(3).permutation(a.n)
        b = PointCloud(tuple(a.ids[i] for i in perm), a.coords[perm])
        _, rmse = procrustes_align(a, b)
        assert rmse <= 1e-12

    def test_id_mismatch(self):
        a = random_cloud(4, 2, seed=0)
        b = PointCloud(("x1", "x2", "x3", "x4"), a.coords)
        with pytest.raises(ValueError, match="id sets"):
            procrustes_align(a, b)


class TestEmbeddingFiles:
    def test_csv_single_point(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("id,x,y\nt1,0.5,0.5\n")
        cloud = import_embedding(path)
        assert cloud.n == 1 and cloud.dims == 2
        assert cloud.ids == ("t1",)

    def test_nan_coordinate_names_line(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("id,x,y\nt1,0.5,0.5\nt2,nan,0.1\n")
        with pytest.raises(ValueError, match="line 3"):
            import_embedding(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("id,x\nt1,0.5\nt1,0.6\n")
        with pytest.raises(ValueError, match="duplicate"):
            import_embedding(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("name,x,y\nt1,0.5,0.5\n")
        with pytest.raises(ValueError, match="header"):
            import_embedding(path)

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip(self, tmp_path, fmt):
        cloud = random_cloud(64, 2, seed=6)
        path = tmp_path / f"cloud.{fmt}"
        export_embedding(cloud, path)
        again = import_embedding(path)
        assert again.ids == cloud.ids
        np.testing.assert_array_equal(again.coords, cloud.coords)

    def test_json_dims_mismatch(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text('{"dims": 2, "points": [{"id": "a", "coords": [1.0]}]}')
        with pytest.raises(ValueError, match="expected 2"):
            import_embedding(path)

    def test_distance_matrix_round_trip(self, tmp_path):
        planted = random_cloud(6, 2, seed=10)
        d = DistanceMatrix(planted.ids, brute_force_distances(planted.coords))
        path = tmp_path / "dist.csv"
        save_distance_matrix(d, path)
        again = load_distance_matrix(path)
        assert again.ids == d.ids
        np.testing.assert_array_equal(again.values, d.values)
