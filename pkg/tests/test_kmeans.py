from itertools import product

import numpy as np
import pytest

from pscluster import Centroids, assign_nearest, kmeans


def exhaustive_two_cluster_inertia(X):
    """Oracle: minimum inertia over every 2-partition of the rows."""
    n = len(X)
    best = np.inf
    for bits in product([0, 1], repeat=n):
        labels = np.array(bits)
        if labels.min() == labels.max():
            continue
        inertia = 0.0
        for c in (0, 1):
            pts = X[labels == c]
            inertia += ((pts - pts.mean(axis=0)) ** 2).sum()
        best = min(best, inertia)
    return best


class TestKmeans:
    def test_two_well_separated_pairs(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        assignment, centroids = kmeans(X, 2, seed=0)
        assert assignment.labels[0] == assignment.labels[1]
        assert assignment.labels[2] == assignment.labels[3]
        assert assignment.labels[0] != assignment.labels[2]
        assert abs(centroids.inertia - 1.0) < 1e-12

    def test_single_cluster_closed_form(self):
        X = np.random.default_rng(0).normal(size=(20, 3))
        assignment, centroids = kmeans(X, 1, seed=0)
        assert (assignment.labels == 0).all()
        assert np.allclose(centroids.centers[0], X.mean(axis=0))
        expected = ((X - X.mean(axis=0)) ** 2).sum()
        assert abs(centroids.inertia - expected) < 1e-9

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_eight_points_reach_exhaustive_optimum(self, seed):
        X = np.random.default_rng(seed).normal(size=(8, 2))
        _, centroids = kmeans(X, 2, seed=seed, restarts=20)
        assert centroids.inertia <= exhaustive_two_cluster_inertia(X) + 1e-9

    def test_inertia_monotone_within_run(self):
        X = np.random.default_rng(5).normal(size=(200, 4))
        _, centroids = kmeans(X, 4, seed=1, restarts=1)
        hist = centroids.inertia_history
        assert len(hist) >= 2
        assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))

    def test_translation_invariant_labels(self):
        X = np.random.default_rng(6).normal(size=(60, 3))
        a1, _ = kmeans(X, 3, seed=7)
        a2, _ = kmeans(X + 123.5, 3, seed=7)
        assert np.array_equal(a1.labels, a2.labels)

    def test_deterministic(self):
        X = np.random.default_rng(8).normal(size=(50, 2))
        a1, c1 = kmeans(X, 3, seed=9)
        a2, c2 = kmeans(X, 3, seed=9)
        assert np.array_equal(a1.labels, a2.labels)
        assert np.array_equal(c1.centers, c2.centers)
        assert c1.inertia == c2.inertia

    def test_duplicate_points_exceeding_k(self):
        # degenerate data: fewer distinct points than would fill k clusters
        X = np.array([[1.0, 1.0]] * 5 + [[2.0, 2.0]] * 5)
        assignment, centroids = kmeans(X, 3, seed=0)
        assert centroids.inertia < 1e-20
        assert len(assignment.labels) == 10

    def test_errors(self):
        X = np.ones((3, 2))
        with pytest.raises(ValueError):
            kmeans(X, 0)
        with pytest.raises(ValueError):
            kmeans(X, 4)


class TestAssignNearest:
    def _centroids(self):
        centers = np.array([[0.0, 0.0], [10.0, 0.0], [5.0, 0.0]])
        return Centroids(centers=centers, inertia=0.0)

    def test_exact_match(self):
        got = assign_nearest(np.array([[10.0, 0.0]]), self._centroids())
        assert got.labels.tolist() == [1]

    def test_tie_goes_to_lowest_index(self):
        # (2.5, 0) is equidistant from centroids 0 and 2
        got = assign_nearest(np.array([[2.5, 0.0]]), self._centroids())
        assert got.labels.tolist() == [0]

    def test_matches_nested_loop_oracle(self):
        rng = np.random.default_rng(10)
        points = rng.normal(size=(50, 3))
        centers = rng.normal(size=(4, 3))
        got = assign_nearest(points, Centroids(centers=centers, inertia=0.0))
        for i, row in enumerate(points):
            dists = [((row - c) ** 2).sum() for c in centers]
            assert got.labels[i] == int(np.argmin(dists))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            assign_nearest(np.ones((2, 4)), self._centroids())
