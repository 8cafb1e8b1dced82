"""Gaussian similarity graph, normalized Laplacian, and spectral embedding.

The pipeline here is: similarity s_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)),
then L = D^{-1/2} S D^{-1/2} with d_ii = sum_j s_ij, then the eigenvectors
of the p largest eigenvalues of L as embedding columns.  Note that this L
(without the I - subtraction) has its informative eigenvectors at the top
of the spectrum, which is why the embedding takes the largest eigenvalues.

Everything is dense; matrices up to a few thousand rows are the intended
scale.  The quadratic memory cost of this path is deliberate: it is the
baseline that the parametric route is benchmarked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import as_matrix
from .errors import EigensolverError

# smallest positive normal double; keeps kernel entries positive if exp underflows
_TINY = np.finfo(np.float64).tiny


@dataclass
class Laplacian:
    """Symmetrically normalized similarity matrix and its degree roots."""

    matrix: np.ndarray        # (nu, nu), symmetric
    degree_roots: np.ndarray  # (nu,), sqrt of row degrees of S


@dataclass
class SpectralEmbedding:
    """Top-p eigenvectors (columns) with their eigenvalues, descending."""

    vectors: np.ndarray      # (nu, p)
    eigenvalues: np.ndarray  # (p,), sorted descending


def gaussian_similarity(data: np.ndarray, sigma: float) -> np.ndarray:
    """Dense Gaussian-kernel similarity matrix.

    Each unordered pair is evaluated once and mirrored, so the result is
    exactly symmetric; the diagonal is exactly 1.
    """
    X = as_matrix(data)
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    n = X.shape[0]
    denom = 2.0 * sigma * sigma
    S = np.empty((n, n), dtype=np.float64)
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        d2 = np.einsum("ij,ij->i", diff, diff)
        row = np.exp(-d2 / denom)
        S[i, i + 1:] = row
        S[i + 1:, i] = row
    np.fill_diagonal(S, 1.0)
    np.maximum(S, _TINY, out=S)
    return S


def median_heuristic_sigma(data: np.ndarray) -> float:
    """Median of all pairwise Euclidean distances; 1.0 if that median is 0."""
    X = as_matrix(data)
    n = X.shape[0]
    if n < 2:
        raise ValueError("median heuristic requires at least 2 rows")
    chunks = []
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        chunks.append(np.einsum("ij,ij->i", diff, diff))
    med = float(np.median(np.sqrt(np.concatenate(chunks))))
    return med if med > 0 else 1.0


def normalized_laplacian(sim: np.ndarray) -> Laplacian:
    """L = D^{-1/2} S D^{-1/2} with d_ii the row sums of S."""
    S = np.asarray(sim, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"similarity matrix must be square, got {S.shape}")
    if not np.array_equal(S, S.T):
        raise ValueError("similarity matrix must be symmetric")
    if S.min() <= 0:
        raise ValueError("similarity entries must be positive")
    degrees = S.sum(axis=1)
    if degrees.min() <= 0:
        raise ValueError("every row degree must be positive")
    roots = np.sqrt(degrees)
    inv_roots = 1.0 / roots
    L = S * inv_roots[:, None]
    L *= inv_roots[None, :]
    return Laplacian(matrix=L, degree_roots=roots)


def _canonicalize_signs(V: np.ndarray) -> np.ndarray:
    """Flip each column whose largest-magnitude entry (first on ties) is negative.

    Vectorized on purpose: np.negative(col, out=col) on strided column views
    silently corrupts memory on this numpy (aliased unary-ufunc fast path).
    """
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[idx, np.arange(V.shape[1])] < 0.0, -1.0, 1.0)
    V *= signs[None, :]
    return V


def spectral_embedding(lap, p: int) -> SpectralEmbedding:
    """Eigenvectors of the p largest eigenvalues of a symmetric matrix.

    Accepts a Laplacian or any symmetric ndarray.  Ordering is by
    descending eigenvalue with ties kept in solver (ascending-index)
    order; each column is sign-canonicalized so the embedding is a
    deterministic function of the input.
    """
    A = lap.matrix if isinstance(lap, Laplacian) else np.asarray(lap, dtype=np.float64)
    n = A.shape[0]
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= {n}, got p={p}")
    try:
        eigenvalues, vectors = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eigendecomposition of order-{n} matrix failed to converge: {exc}"
        ) from exc
    order = np.argsort(-eigenvalues, kind="stable")[:p]
    V = np.ascontiguousarray(vectors[:, order])
    return SpectralEmbedding(
        vectors=_canonicalize_signs(V),
        eigenvalues=eigenvalues[order].copy(),
    )
