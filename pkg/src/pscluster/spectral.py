"""Baseline spectral clustering: similarity -> Laplacian -> embedding -> k-means.

This path is the honest expensive reference: it materializes both dense
n x n matrices and runs a full eigendecomposition.  The returned embedding
doubles as the regression target set for the parametric route.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataio import as_matrix
from .graph import (
    gaussian_similarity,
    median_heuristic_sigma,
    normalized_laplacian,
    spectral_embedding,
)
from .kmeans import kmeans


@dataclass
class ScConfig:
    """Spectral clustering parameters.

    sigma may be the string "auto" (median of pairwise distances) or a
    positive number.  p defaults to k.  normalize_rows enables unit-norm
    embedding rows before k-means (off by default; the plain pipeline
    clusters raw eigenvector rows).
    """

    k: int
    p: int | None = None
    sigma: float | str = "auto"
    seed: int = 0
    normalize_rows: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.p is not None and self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.sigma != "auto" and not float(self.sigma) > 0:
            raise ValueError(f"sigma must be positive or 'auto', got {self.sigma}")

    def embedding_width(self) -> int:
        return self.k if self.p is None else self.p


def resolve_sigma(data: np.ndarray, sigma) -> float:
    return median_heuristic_sigma(data) if sigma == "auto" else float(sigma)


def spectral_cluster(data, config: ScConfig):
    """Run the full pipeline; returns (ClusterAssignment, SpectralEmbedding)."""
    X = as_matrix(data)
    n, d = X.shape
    p = config.embedding_width()
    if n < config.k:
        raise ValueError(f"cannot form k={config.k} clusters from {n} points")
    if p > n:
        raise ValueError(f"embedding width p={p} exceeds {n} points")
    if p >= d:
        warnings.warn(
            f"embedding width p={p} does not reduce dimension d={d}",
            stacklevel=2,
        )
    if p < config.k:
        warnings.warn(
            f"embedding width p={p} below cluster count k={config.k}",
            stacklevel=2,
        )
    sigma = resolve_sigma(X, config.sigma)
    sim = gaussian_similarity(X, sigma)
    lap = normalized_laplacian(sim)
    embedding = spectral_embedding(lap, p)
    points = embedding.vectors
    if config.normalize_rows:
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        points = points / norms
    assignment, _ = kmeans(points, config.k, seed=config.seed)
    return assignment, embedding
