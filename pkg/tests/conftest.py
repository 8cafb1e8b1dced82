"""Shared fixtures: vendored tabular datasets and the image-set builder."""

from pathlib import Path

import numpy as np
import pytest

from pscluster import load_csv
from pscluster.rng import SplitMix64

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def iris():
    X, y = load_csv(DATA_DIR / "iris.csv", "label")
    return X, y


@pytest.fixture(scope="session")
def wine():
    X, y = load_csv(DATA_DIR / "wine.csv", "label")
    return X, y


@pytest.fixture(scope="session")
def breast_cancer():
    X, y = load_csv(DATA_DIR / "breast_cancer.csv", "label")
    return X, y


def build_digit_images(n: int, seed: int, shift: int = 1,
                       noise_std: float = 0.02):
    """28x28 digit images built from the bundled 8x8 UCI digits.

    Upscales 3x with 2-pixel padding, applies small random shifts and pixel
    noise, and samples with replacement to reach n rows.  Deterministic for
    a fixed seed.  Returns (X in [0,1] with shape (n, 784), labels).
    """
    from sklearn.datasets import load_digits

    digits = load_digits()
    base = digits.images / 16.0
    labels = digits.target
    rng = SplitMix64(seed)
    reps = (rng.u64(n) % np.uint64(len(base))).astype(np.int64)
    span = 2 * shift + 1
    shifts = (rng.u64(2 * n) % np.uint64(span)).astype(np.int64).reshape(n, 2) - shift
    noise = noise_std * rng.normal(n * 28 * 28).reshape(n, 28, 28)
    out = np.empty((n, 28, 28))
    for i in range(n):
        img = np.pad(np.kron(base[reps[i]], np.ones((3, 3))), 2)
        out[i] = np.roll(img, (shifts[i, 0], shifts[i, 1]), axis=(0, 1))
    X = np.clip(out + noise, 0.0, 1.0).reshape(n, 784)
    return X, labels[reps].astype(np.int64)
