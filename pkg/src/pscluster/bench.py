"""Wall-clock and peak-memory instrumentation plus the benchmark runners.

The primary memory metric is the allocator high-water: the peak of
tracemalloc's traced byte counter over a phase.  numpy registers its array
buffers with tracemalloc, so the counter captures the matrices that
dominate these workloads and is deterministic, unlike process RSS (which
is reported alongside as a monotone, platform-dependent secondary
reading).

Because tracing slows allocation-heavy code, benchmark trials run each
phase twice: an untraced pass for wall time (whose outputs are kept) and
a traced pass for the high-water.  One phase runs at a time per process.
"""

from __future__ import annotations

import hashlib
import json
import time
import tracemalloc
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np

from .dataio import gen_blobs, gen_circles
from .errors import AllocationBudgetExceeded
from .metrics import MeanStd, TrialSummary, mean_std, score_clustering, trial_summary
from .neural import TrainHyperparams
from .psc import psc_cluster, psc_train
from .rng import derive
from .spectral import ScConfig, spectral_cluster

try:
    import resource

    def _peak_rss_bytes() -> int | None:
        return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
except ImportError:  # pragma: no cover - non-POSIX platform

    def _peak_rss_bytes() -> int | None:
        return None


@dataclass
class MemoryProbe:
    """Peak bytes per mode; allocator peak is None when tracing was off."""

    allocator_peak_bytes: int | None
    rss_peak_bytes: int | None

    @property
    def mode(self) -> str:
        return "allocator-high-water" if self.allocator_peak_bytes is not None \
            else "process-peak-rss"


def measure_phase(phase, trace_memory: bool = True):
    """Run one unit of work; returns (result, elapsed_seconds, MemoryProbe).

    With trace_memory the allocator counter is reset before the phase and
    its high-water read after; otherwise only wall time and RSS are taken.
    """
    allocator_peak = None
    if trace_memory:
        started_here = not tracemalloc.is_tracing()
        if started_here:
            tracemalloc.start()
        tracemalloc.reset_peak()
        begin = tracemalloc.get_traced_memory()[0]
    start = time.perf_counter()
    result = phase()
    elapsed = time.perf_counter() - start
    if trace_memory:
        allocator_peak = max(tracemalloc.get_traced_memory()[1] - begin, 0)
        if started_here:
            tracemalloc.stop()
    return result, elapsed, MemoryProbe(
        allocator_peak_bytes=allocator_peak,
        rss_peak_bytes=_peak_rss_bytes(),
    )


def embed_budget_bytes(n: int, p: int, d: int) -> int:
    """Allocation budget for the parametric inference path on n points."""
    return 64 * n * max(p, d)


@contextmanager
def allocation_guard(threshold_bytes: int):
    """Raise AllocationBudgetExceeded if the block's high-water passes the budget."""
    started_here = not tracemalloc.is_tracing()
    if started_here:
        tracemalloc.start()
    tracemalloc.reset_peak()
    begin = tracemalloc.get_traced_memory()[0]
    try:
        yield
        peak = tracemalloc.get_traced_memory()[1] - begin
    finally:
        if started_here:
            tracemalloc.stop()
    if peak > threshold_bytes:
        raise AllocationBudgetExceeded(int(peak), int(threshold_bytes))


# ---------------------------------------------------------------------------
# benchmark reports


@dataclass
class PhaseStats:
    seconds: MeanStd
    allocator_peak_bytes: MeanStd
    rss_peak_bytes: int | None


@dataclass
class BenchReport:
    """One method's measurements over repeated seeded trials."""

    method: str
    dataset: dict           # rows, cols, sha256 fingerprint
    config: dict            # everything needed to re-run bit-identically
    trials: int
    phases: dict            # phase name -> PhaseStats
    quality: TrialSummary | None
    labels_sha256: list     # per-trial hash of the emitted labels

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def dataset_fingerprint(X: np.ndarray) -> dict:
    digest = hashlib.sha256(np.ascontiguousarray(X, dtype="<f8").tobytes())
    return {"rows": int(X.shape[0]), "cols": int(X.shape[1]),
            "sha256": digest.hexdigest()}


def labels_digest(labels: np.ndarray) -> str:
    return hashlib.sha256(
        np.ascontiguousarray(labels, dtype="<i8").tobytes()
    ).hexdigest()


def _phase_stats(times, peaks) -> PhaseStats:
    return PhaseStats(
        seconds=mean_std(times),
        allocator_peak_bytes=mean_std(peaks),
        rss_peak_bytes=_peak_rss_bytes(),
    )


def make_dataset(name: str, n: int, d: int = 2, k: int = 2, seed: int = 0,
                 noise: float = 0.05, spread: float = 1.0,
                 radius_inner: float = 1.0, radius_outer: float = 5.0):
    """Synthetic labeled dataset by name ('circles' or 'blobs')."""
    if name == "circles":
        return gen_circles(n, radius_inner, radius_outer, noise, seed)
    if name == "blobs":
        return gen_blobs(n, d, k, spread, seed)
    raise ValueError(f"unknown dataset {name!r} (choose circles or blobs)")


def run_sc_bench(X, y, k: int, trials: int, base_seed: int = 0,
                 sigma="auto", p: int | None = None) -> BenchReport:
    """Measure the full spectral pipeline over seeded trials."""
    times, peaks, scores, hashes = [], [], [], []
    for t in range(trials):
        seed = derive(base_seed, t)
        cfg = ScConfig(k=k, p=p, sigma=sigma, seed=seed)
        (assignment, _), elapsed, _ = measure_phase(
            lambda: spectral_cluster(X, cfg), trace_memory=False)
        _, _, probe = measure_phase(lambda: spectral_cluster(X, cfg))
        times.append(elapsed)
        peaks.append(probe.allocator_peak_bytes)
        hashes.append(labels_digest(assignment.labels))
        if y is not None:
            scores.append(score_clustering(y, assignment.labels))
    return BenchReport(
        method="sc",
        dataset=dataset_fingerprint(X),
        config={"k": k, "p": p, "sigma": sigma, "base_seed": base_seed,
                "trials": trials},
        trials=trials,
        phases={"total": _phase_stats(times, peaks)},
        quality=trial_summary(scores) if scores else None,
        labels_sha256=hashes,
    )


def run_psc_bench(X, y, k: int, rate: float, trials: int, base_seed: int = 0,
                  sigma="auto", p: int | None = None,
                  mlp_widths=(32, 64, 32),
                  hp: TrainHyperparams | None = None,
                  scale_features: bool = False) -> BenchReport:
    """Measure PSC training and inference phases over seeded trials."""
    hp = hp or TrainHyperparams()
    p = p if p is not None else k
    train_times, train_peaks = [], []
    infer_times, infer_peaks = [], []
    scores, hashes = [], []
    for t in range(trials):
        seed = derive(base_seed, t)
        trial_hp = TrainHyperparams(
            epochs=hp.epochs, batch_size=hp.batch_size,
            learning_rate=hp.learning_rate, optimizer=hp.optimizer, seed=seed)

        def train():
            return psc_train(X, rate=rate, p=p, sigma=sigma,
                             mlp_widths=mlp_widths, hp=trial_hp,
                             scale_features=scale_features)

        model, elapsed, _ = measure_phase(train, trace_memory=False)
        _, _, probe = measure_phase(train)
        train_times.append(elapsed)
        train_peaks.append(probe.allocator_peak_bytes)

        def infer():
            return psc_cluster(model, X, k, seed=seed)

        assignment, elapsed, _ = measure_phase(infer, trace_memory=False)
        _, _, probe = measure_phase(infer)
        infer_times.append(elapsed)
        infer_peaks.append(probe.allocator_peak_bytes)
        hashes.append(labels_digest(assignment.labels))
        if y is not None:
            scores.append(score_clustering(y, assignment.labels))
    return BenchReport(
        method="psc",
        dataset=dataset_fingerprint(X),
        config={"k": k, "p": p, "rate": rate, "sigma": sigma,
                "mlp_widths": list(mlp_widths), "base_seed": base_seed,
                "trials": trials, "epochs": hp.epochs,
                "batch_size": hp.batch_size, "learning_rate": hp.learning_rate,
                "optimizer": hp.optimizer, "scale_features": scale_features},
        trials=trials,
        phases={"training": _phase_stats(train_times, train_peaks),
                "inference": _phase_stats(infer_times, infer_peaks)},
        quality=trial_summary(scores) if scores else None,
        labels_sha256=hashes,
    )


def memory_scaling(method: str, sizes, d: int = 10, k: int = 3, seed: int = 0,
                   train_sample: int = 200) -> dict:
    """Allocator high-water per n plus the fitted log-log exponent.

    For 'sc' the measured phase is the full pipeline; for 'psc' it is the
    inference path only (embed + k-means), with the model trained on a
    small fixed-size sample so train cost stays flat.
    """
    peaks = []
    for n in sizes:
        X, _ = gen_blobs(n, d, k, spread=1.0, seed=derive(seed, n))
        if method == "sc":
            cfg = ScConfig(k=k, seed=seed)
            _, _, probe = measure_phase(lambda: spectral_cluster(X, cfg))
        elif method == "psc":
            rate = min(1.0, train_sample / n)
            model = psc_train(X, rate=rate, p=k,
                              hp=TrainHyperparams(epochs=50, seed=seed))
            _, _, probe = measure_phase(lambda: psc_cluster(model, X, k, seed=seed))
        else:
            raise ValueError(f"unknown method {method!r}")
        peaks.append(probe.allocator_peak_bytes)
    exponent = float(np.polyfit(np.log(np.asarray(sizes, dtype=float)),
                                np.log(np.asarray(peaks, dtype=float)), 1)[0])
    return {"sizes": list(sizes), "peak_bytes": peaks, "exponent": exponent}
