"""Parametric spectral clustering: training, inference, incremental mode,
and model persistence.

Training samples nu = round(r * n) rows, builds the spectral embedding of
the sample only, and fits a regressor mapping sampled points to their
embedding rows.  Inference replaces eigendecomposition with a forward
pass: it never allocates anything quadratic in n (the forward pass runs
over fixed-size row chunks into a preallocated output).

Model files are versioned text containers: a magic line, a JSON metadata
line, then one base64 blob line per array (little-endian float64, fixed
order) with a SHA-256 checksum over all blob bytes in the header.
"""

from __future__ import annotations

import base64
import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .dataio import ScalerParams, as_matrix, standardize
from .errors import ModelFormatError
from .graph import gaussian_similarity, normalized_laplacian, spectral_embedding
from .kmeans import Centroids, ClusterAssignment, assign_nearest, kmeans
from .neural import Mlp, MlpConfig, TrainHyperparams, init_mlp, regressor_config, train_mlp
from .rng import SplitMix64, derive
from .spectral import resolve_sigma

FORMAT_VERSION = 1
_MAGIC = "PSCMODEL"

# forward passes run in chunks of this many rows to keep transients O(1) in n
EMBED_CHUNK = 2048

INCREMENTAL_MODES = ("recluster-all", "assign-to-centroids")


@dataclass
class PscModel:
    """Trained parametric map from feature space to embedding space."""

    regressor: Mlp
    p: int
    d: int
    sigma: float
    scaler: ScalerParams | None
    sample_rate: float
    train_seed: int
    train_mse: float
    format_version: int = FORMAT_VERSION


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def psc_train(data, rate: float, p: int, sigma: float | str = "auto",
              mlp_widths=(32, 64, 32), hp: TrainHyperparams | None = None,
              scale_features: bool = False) -> PscModel:
    """Train a PSC model on a sampled subset of `data`.

    rate is the sampling fraction r in (0, 1]; nu = round(r * n) rows are
    drawn without replacement (seeded partial shuffle).  The similarity
    graph, Laplacian, and p-column embedding are built on the sample only,
    and the regressor is fit to map sampled rows to their embedding rows.
    With scale_features the data is standardized first and the scaler is
    stored so inference standardizes new points identically.
    """
    hp = hp or TrainHyperparams()
    X = as_matrix(data)
    n, d = X.shape
    if not 0 < rate <= 1:
        raise ValueError(f"sampling rate must be in (0, 1], got {rate}")
    nu = min(_round_half_up(rate * n), n)
    if nu < max(p, 2):
        raise ValueError(
            f"sample of {nu} rows (rate {rate}) cannot support p={p} eigenvectors"
        )
    scaler = None
    if scale_features:
        X, scaler = standardize(X)

    if nu == n:
        # rate 1 degenerates to the full data in original order, so the
        # regression targets coincide exactly with the full spectral embedding
        sample_idx = np.arange(n)
    else:
        sample_idx = SplitMix64(derive(hp.seed, 17)).sample_indices(n, nu)
    Xs = X[sample_idx]
    sigma_value = resolve_sigma(Xs, sigma)
    sim = gaussian_similarity(Xs, sigma_value)
    embedding = spectral_embedding(normalized_laplacian(sim), p)

    config = regressor_config(d, mlp_widths, p)
    model = init_mlp(config, derive(hp.seed, 0))
    curve = train_mlp(model, Xs, embedding.vectors, hp)
    return PscModel(
        regressor=model,
        p=p,
        d=d,
        sigma=sigma_value,
        scaler=scaler,
        sample_rate=rate,
        train_seed=hp.seed,
        train_mse=curve[-1],
    )


def psc_embed(model: PscModel, data) -> np.ndarray:
    """Map rows of `data` into the p-dimensional embedding space.

    Pure forward pass in fixed-size chunks; peak transient memory is
    O(chunk * widest_layer) plus the n x p output, never O(n^2).
    """
    X = as_matrix(data, allow_empty=True)
    if X.shape[1] != model.d:
        raise ValueError(f"data width {X.shape[1]} != model width {model.d}")
    out = np.empty((X.shape[0], model.p), dtype=np.float64)
    reg = model.regressor
    for start in range(0, X.shape[0], EMBED_CHUNK):
        chunk = X[start : start + EMBED_CHUNK]
        if model.scaler is not None:
            chunk = model.scaler.apply(chunk)
        a = chunk
        for i, (W, b) in enumerate(zip(reg.weights, reg.biases)):
            a = a @ W + b
            if reg.config.activations[i] == "relu":
                np.maximum(a, 0.0, out=a)
        out[start : start + EMBED_CHUNK] = a
    return out


def psc_cluster(model: PscModel, data, k: int, seed: int = 0) -> ClusterAssignment:
    """Embed all rows and k-means them; the partition covers every row."""
    X = as_matrix(data)
    if X.shape[0] < k:
        raise ValueError(f"cannot form k={k} clusters from {X.shape[0]} points")
    assignment, _ = kmeans(psc_embed(model, X), k, seed=seed)
    return assignment


@dataclass
class IncrementalSession:
    """Grows a clustering as batches arrive, embedding only the new rows.

    recluster-all reruns k-means over every cached embedding (cluster IDs
    may move between batches); assign-to-centroids labels new points by
    the frozen centroids, leaving previous labels untouched.  Embedding
    and clustering wall times are recorded separately per extend.  Single
    writer: callers serialize concurrent extends.
    """

    model: PscModel
    mode: str
    embeddings: np.ndarray
    assignment: ClusterAssignment
    centroids: Centroids
    embed_seconds: list = field(default_factory=list)
    cluster_seconds: list = field(default_factory=list)


def start_session(model: PscModel, base_data, k: int, seed: int = 0,
                  mode: str = "recluster-all") -> IncrementalSession:
    """Embed and cluster the initially available data."""
    if mode not in INCREMENTAL_MODES:
        raise ValueError(f"mode must be one of {INCREMENTAL_MODES}, got {mode!r}")
    embeddings = psc_embed(model, base_data)
    assignment, centroids = kmeans(embeddings, k, seed=seed)
    return IncrementalSession(
        model=model,
        mode=mode,
        embeddings=embeddings,
        assignment=assignment,
        centroids=centroids,
    )


def incremental_extend(session: IncrementalSession, new_batch, k: int,
                       seed: int = 0) -> ClusterAssignment:
    """Fold a batch of new points into the session's clustering.

    Embedding work is O(batch); returns the assignment for all points seen
    so far.  In assign-to-centroids mode k must match the session's
    centroids and previous labels are preserved exactly.
    """
    X = as_matrix(new_batch, allow_empty=True)
    if X.shape[0] and X.shape[1] != session.model.d:
        raise ValueError(
            f"batch width {X.shape[1]} != model width {session.model.d}"
        )
    t0 = time.perf_counter()
    new_embeddings = psc_embed(session.model, X) if X.shape[0] else None
    session.embed_seconds.append(time.perf_counter() - t0)
    if new_embeddings is not None:
        session.embeddings = np.vstack([session.embeddings, new_embeddings])

    t0 = time.perf_counter()
    if session.mode == "recluster-all":
        assignment, centroids = kmeans(session.embeddings, k, seed=seed)
        session.centroids = centroids
    else:
        if k != session.centroids.k:
            raise ValueError(
                f"assign-to-centroids session has k={session.centroids.k}, got k={k}"
            )
        labels = session.assignment.labels
        if new_embeddings is not None:
            extra = assign_nearest(new_embeddings, session.centroids)
            labels = np.concatenate([labels, extra.labels])
        assignment = ClusterAssignment(labels=labels, k=k)
    session.cluster_seconds.append(time.perf_counter() - t0)
    session.assignment = assignment
    return assignment


# ---------------------------------------------------------------------------
# persistence


def _blob_items(model: PscModel):
    """(name, array) pairs in the fixed serialization order."""
    reg = model.regressor
    for i, (W, b) in enumerate(zip(reg.weights, reg.biases)):
        yield f"W{i}", W
        yield f"b{i}", b
    if model.scaler is not None:
        yield "scaler_mean", model.scaler.mean
        yield "scaler_std", model.scaler.std


def _blob_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def save_model(model: PscModel, path) -> None:
    """Write the versioned text container; round-trips bit-exactly."""
    checksum = hashlib.sha256()
    blob_lines = []
    for name, arr in _blob_items(model):
        raw = _blob_bytes(arr)
        checksum.update(raw)
        shape = " ".join(str(s) for s in arr.shape)
        blob_lines.append(f"{name} {shape} {base64.b64encode(raw).decode()}")
    header = {
        "format_version": model.format_version,
        "d": model.d,
        "p": model.p,
        "sigma": model.sigma,
        "sample_rate": model.sample_rate,
        "train_seed": model.train_seed,
        "train_mse": model.train_mse,
        "layer_widths": list(model.regressor.config.layer_widths),
        "activations": list(model.regressor.config.activations),
        "has_scaler": model.scaler is not None,
        "sha256": checksum.hexdigest(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_MAGIC} {model.format_version}\n")
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for line in blob_lines:
            fh.write(line + "\n")


def load_model(path) -> PscModel:
    """Read a model container, verifying version and checksum."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(_MAGIC + " "):
        raise ModelFormatError(f"{path}: not a model container")
    try:
        version = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ModelFormatError(f"{path}: malformed magic line {lines[0]!r}") from None
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format version {version} (supported: {FORMAT_VERSION})"
        )
    if len(lines) < 2:
        raise ModelFormatError(f"{path}: missing header")
    try:
        header = json.loads(lines[1])
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: malformed header: {exc}") from None

    blobs = {}
    checksum = hashlib.sha256()
    for line in lines[2:]:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ModelFormatError(f"{path}: malformed blob line {line[:40]!r}")
        name, b64 = parts[0], parts[-1]
        try:
            shape = tuple(int(s) for s in parts[1:-1])
            raw = base64.b64decode(b64, validate=True)
        except ValueError as exc:  # binascii.Error is a ValueError
            raise ModelFormatError(f"{path}: malformed blob {name!r}: {exc}") from None
        checksum.update(raw)
        arr = np.frombuffer(raw, dtype="<f8")
        if arr.size != int(np.prod(shape)):
            raise ModelFormatError(
                f"{path}: blob {name!r} has {arr.size} values, shape says {shape}"
            )
        blobs[name] = arr.reshape(shape).copy()
    if checksum.hexdigest() != header.get("sha256"):
        raise ModelFormatError(f"{path}: checksum mismatch, refusing to load")

    config = MlpConfig(tuple(header["layer_widths"]), tuple(header["activations"]))
    n_layers = len(config.layer_widths) - 1
    try:
        weights = [blobs[f"W{i}"] for i in range(n_layers)]
        biases = [blobs[f"b{i}"] for i in range(n_layers)]
    except KeyError as exc:
        raise ModelFormatError(f"{path}: missing blob {exc}") from None
    scaler = None
    if header.get("has_scaler"):
        try:
            scaler = ScalerParams(mean=blobs["scaler_mean"], std=blobs["scaler_std"])
        except KeyError as exc:
            raise ModelFormatError(f"{path}: missing blob {exc}") from None
    return PscModel(
        regressor=Mlp(weights=weights, biases=biases, config=config),
        p=int(header["p"]),
        d=int(header["d"]),
        sigma=float(header["sigma"]),
        scaler=scaler,
        sample_rate=float(header["sample_rate"]),
        train_seed=int(header["train_seed"]),
        train_mse=float(header["train_mse"]),
        format_version=version,
    )
