"""Dataset loading, synthetic data generation, and feature standardization.

Data matrices are plain float64 numpy arrays of shape (n, d).  Every loader
and generator runs its output through :func:`as_matrix`, so no matrix with
NaN/Inf entries enters the rest of the system.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .rng import SplitMix64

IDX_IMAGE_MAGIC = 0x00000803


def as_matrix(values, allow_empty: bool = False) -> np.ndarray:
    """Validate and convert to a finite float64 matrix of shape (n, d)."""
    X = np.ascontiguousarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise DataFormatError(f"expected a 2-D matrix, got shape {X.shape}")
    if X.shape[0] == 0 and not allow_empty:
        raise DataFormatError("matrix has no rows")
    if X.shape[1] < 1:
        raise DataFormatError("matrix has no columns")
    if not np.isfinite(X).all():
        i, j = np.argwhere(~np.isfinite(X))[0]
        raise DataFormatError(f"non-finite value at row {i}, column {j}")
    return X


def as_labels(values, n: int | None = None) -> np.ndarray:
    """Validate a vector of non-negative integer class IDs."""
    y = np.asarray(values)
    if y.ndim != 1:
        raise DataFormatError(f"labels must be 1-D, got shape {y.shape}")
    if y.size and (np.asarray(y, dtype=np.float64) % 1 != 0).any():
        raise DataFormatError("labels must be integers")
    y = y.astype(np.int64)
    if y.size and y.min() < 0:
        raise DataFormatError("labels must be non-negative")
    if n is not None and len(y) != n:
        raise DataFormatError(f"label count {len(y)} != row count {n}")
    return y


def load_csv(path, label_column: str | None = None):
    """Load a numeric CSV with a header row.

    Returns (matrix, labels) where labels is None unless `label_column`
    names a header column; that column is excluded from the features and
    parsed as non-negative integer class IDs.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected a header row")
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None:
            if label_column not in header:
                raise DataFormatError(
                    f"{path}: label column {label_column!r} not in header {header}"
                )
            label_idx = header.index(label_column)

        rows: list[list[float]] = []
        labels: list[int] = []
        for lineno, cells in enumerate(reader, start=1):
            if len(cells) != len(header):
                raise DataFormatError(
                    f"{path}: row {lineno} has {len(cells)} cells, expected {len(header)}"
                )
            feats = []
            for j, cell in enumerate(cells):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {header[j]!r}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
                if j == label_idx:
                    if value % 1 != 0 or value < 0:
                        raise DataFormatError(
                            f"{path}: row {lineno}: label {cell.strip()!r} is not a "
                            "non-negative integer"
                        )
                    labels.append(int(value))
                else:
                    feats.append(value)
            rows.append(feats)

    X = as_matrix(rows)
    y = as_labels(labels, n=len(rows)) if label_idx is not None else None
    return X, y


def load_idx(path) -> np.ndarray:
    """Load an IDX image file (big-endian, unsigned bytes) as rows in [0, 1].

    Each image is flattened to one row and pixel values are divided by 255.
    """
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) < 16:
            raise DataFormatError(f"{path}: truncated IDX header")
        magic, count, rows, cols = struct.unpack(">IIII", head)
        if magic != IDX_IMAGE_MAGIC:
            raise DataFormatError(
                f"{path}: bad IDX magic 0x{magic:08X}, expected 0x{IDX_IMAGE_MAGIC:08X}"
            )
        expected = count * rows * cols
        payload = fh.read(expected + 1)
    if len(payload) < expected:
        raise DataFormatError(
            f"{path}: truncated IDX payload, expected {expected} bytes, got {len(payload)}"
        )
    if len(payload) > expected:
        raise DataFormatError(f"{path}: {len(payload) - expected} trailing bytes")
    pixels = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    return as_matrix(pixels.reshape(count, rows * cols))


def gen_circles(n: int, radius_inner: float, radius_outer: float,
                noise_std: float, seed: int):
    """Two concentric circles with Gaussian radial noise.

    n/2 points on each circle; label 0 = inner, 1 = outer.  Pure function
    of its arguments (fixed seed gives bit-identical output).
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n % 2 != 0:
        raise ValueError(f"n must split evenly across the two circles, got {n}")
    if not 0 < radius_inner < radius_outer:
        raise ValueError(
            f"need 0 < radius_inner < radius_outer, got {radius_inner}, {radius_outer}"
        )
    if noise_std < 0:
        raise ValueError(f"noise_std must be >= 0, got {noise_std}")
    rng = SplitMix64(seed)
    half = n // 2
    theta = 2.0 * np.pi * rng.random(n)
    radius = np.repeat([radius_inner, radius_outer], half)
    if noise_std > 0:
        radius = radius + noise_std * rng.normal(n)
    X = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    y = np.repeat([0, 1], half).astype(np.int64)
    return as_matrix(X), y


def gen_blobs(n: int, d: int, k: int, spread: float, seed: int,
              center_scale: float = 10.0):
    """k isotropic Gaussian blobs in d dimensions with labeled points."""
    if n < k or k < 1 or d < 1:
        raise ValueError(f"invalid blob shape n={n}, d={d}, k={k}")
    if spread < 0:
        raise ValueError(f"spread must be >= 0, got {spread}")
    rng = SplitMix64(seed)
    centers = center_scale * rng.normal_matrix(k, d)
    counts = [n // k + (1 if i < n % k else 0) for i in range(k)]
    y = np.repeat(np.arange(k, dtype=np.int64), counts)
    X = centers[y] + spread * rng.normal_matrix(n, d)
    return as_matrix(X), y


@dataclass
class ScalerParams:
    """Per-column mean and standard deviation (population convention).

    Zero-variance columns carry the sentinel std 1 so they standardize to
    zeros and invert exactly.
    """

    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def invert(self, Z: np.ndarray) -> np.ndarray:
        return Z * self.std + self.mean


def standardize(data: np.ndarray):
    """Center each column to mean 0 and scale non-constant columns to std 1.

    Returns (standardized matrix, ScalerParams).  Uses the population
    (divide-by-n) standard deviation.
    """
    X = as_matrix(data)
    if X.shape[0] < 2:
        raise ValueError("standardize requires at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    params = ScalerParams(mean=mean, std=std)
    return params.apply(X), params
