"""k-means with k-means++ seeding, restarts, and deterministic behavior.

All randomness comes from the splitmix64 stream of the given seed, so a
fixed (points, k, seed, ...) input reproduces bit-identical results.  Ties
in nearest-centroid assignment go to the lowest centroid index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataio import as_matrix
from .rng import SplitMix64


@dataclass
class ClusterAssignment:
    """Cluster IDs in {0..k-1}, one per clustered row."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.size and not (
            0 <= self.labels.min() and self.labels.max() < self.k
        ):
            raise ValueError(f"labels outside [0, {self.k})")


@dataclass
class Centroids:
    """Cluster centers with the inertia of the accepted solution."""

    centers: np.ndarray   # (k, p)
    inertia: float
    # inertia after each assignment step of the winning restart
    inertia_history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (points * points).sum(axis=1)[:, None]
        - 2.0 * points @ centers.T
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0, out=d2)


def _plus_plus_init(points: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++: each next center drawn with probability prop. to min d^2."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=np.float64)
    centers[0] = points[rng.randbelow(n)]
    if k == 1:
        return centers
    d2 = _squared_distances(points, centers[:1]).ravel()
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = rng.randbelow(n)  # all remaining points coincide with a center
        else:
            cum = np.cumsum(d2)
            u = rng.random(1)[0] * total
            idx = int(np.searchsorted(cum, u, side="right"))
            idx = min(idx, n - 1)
        centers[c] = points[idx]
        np.minimum(d2, _squared_distances(points, centers[c : c + 1]).ravel(), out=d2)
    return centers


def _lloyd(points, centers, max_iter, tol):
    n, p = points.shape
    k = centers.shape[0]
    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _squared_distances(points, centers)
        labels = np.argmin(d2, axis=1)
        resid = points - centers[labels]
        assigned_d2 = np.einsum("ij,ij->i", resid, resid)
        history.append(float(assigned_d2.sum()))

        sums = np.zeros((k, p), dtype=np.float64)
        np.add.at(sums, labels, points)
        counts = np.bincount(labels, minlength=k)
        new_centers = centers.copy()
        nonempty = counts > 0
        new_centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        # empty clusters: reseed to the point currently farthest from its centroid
        if not nonempty.all():
            farthest = assigned_d2.copy()
            for j in np.flatnonzero(~nonempty):
                idx = int(np.argmax(farthest))
                new_centers[j] = points[idx]
                farthest[idx] = -1.0
        movement = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if movement < tol:
            break
    # sync labels and inertia with the final centers
    d2 = _squared_distances(points, centers)
    labels = np.argmin(d2, axis=1)
    resid = points - centers[labels]
    inertia = float(np.einsum("ij,ij->i", resid, resid).sum())
    history.append(inertia)
    return labels, centers, inertia, history


def kmeans(points, k: int, seed: int = 0, max_iter: int = 300,
           tol: float = 1e-6, restarts: int = 10):
    """Cluster rows of `points` into k groups.

    Runs `restarts` independent k-means++ seedings and keeps the lowest
    inertia (first on exact ties).  Returns (ClusterAssignment, Centroids).
    """
    X = as_matrix(points)
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available points")
    if max_iter < 1 or tol < 0 or restarts < 1:
        raise ValueError("need max_iter >= 1, tol >= 0, restarts >= 1")
    rng = SplitMix64(seed)
    best = None
    for _ in range(restarts):
        init = _plus_plus_init(X, k, rng)
        labels, centers, inertia, history = _lloyd(X, init, max_iter, tol)
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia, history)
    labels, centers, inertia, history = best
    return (
        ClusterAssignment(labels=labels, k=k),
        Centroids(centers=centers, inertia=inertia, inertia_history=history),
    )


def assign_nearest(points, centroids: Centroids) -> ClusterAssignment:
    """Label each row with its nearest centroid (lowest index on ties)."""
    X = as_matrix(points, allow_empty=True)
    centers = centroids.centers
    if X.shape[1] != centers.shape[1]:
        raise ValueError(
            f"point width {X.shape[1]} != centroid width {centers.shape[1]}"
        )
    if X.shape[0] == 0:
        return ClusterAssignment(labels=np.empty(0, dtype=np.int64), k=centroids.k)
    labels = np.argmin(_squared_distances(X, centers), axis=1)
    return ClusterAssignment(labels=labels, k=centroids.k)
