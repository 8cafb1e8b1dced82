"""Clustering-quality scores: ClusterAcc, ARI, and AMI.

All three are computed from the contingency table between ground-truth
classes and predicted clusters, and all are invariant under relabeling
either side:

* ClusterAcc maximizes per-point agreement over bijective relabelings of
  the predicted IDs (maximum-weight matching on the contingency table,
  zero-padded to square when the label sets differ in size).
* ARI is the pair-counting Rand index adjusted for chance under the
  permutation model.
* AMI is mutual information adjusted by its exact hypergeometric
  expectation, normalized by the arithmetic mean of the two entropies.
  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assignment import max_weight_assignment
from .dataio import as_labels


@dataclass
class ContingencyTable:
    counts: np.ndarray       # (classes, clusters) int64
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int


@dataclass
class QualityScores:
    cluster_acc: float
    ari: float
    ami: float


@dataclass
class MeanStd:
    mean: float
    std: float


@dataclass
class TrialSummary:
    cluster_acc: MeanStd
    ari: MeanStd
    ami: MeanStd
    trials: int


def contingency_table(y, yhat) -> ContingencyTable:
    """Co-occurrence counts between true classes (rows) and clusters (cols)."""
    y = as_labels(y)
    yhat = as_labels(yhat)
    if len(y) != len(yhat):
        raise ValueError(f"label lengths differ: {len(y)} vs {len(yhat)}")
    if len(y) == 0:
        raise ValueError("empty label vectors")
    _, yi = np.unique(y, return_inverse=True)
    _, hi = np.unique(yhat, return_inverse=True)
    r = int(yi.max()) + 1
    c = int(hi.max()) + 1
    counts = np.zeros((r, c), dtype=np.int64)
    np.add.at(counts, (yi, hi), 1)
    return ContingencyTable(
        counts=counts,
        row_marginals=counts.sum(axis=1),
        col_marginals=counts.sum(axis=0),
        n=len(y),
    )


def cluster_accuracy(y, yhat) -> float:
    """Accuracy maximized over bijective relabelings of the predicted IDs."""
    table = contingency_table(y, yhat)
    counts = table.counts
    m = max(counts.shape)
    padded = np.zeros((m, m), dtype=np.float64)
    padded[: counts.shape[0], : counts.shape[1]] = counts
    cols = max_weight_assignment(padded)
    matched = padded[np.arange(m), cols].sum()
    return float(matched) / table.n


def _is_identical_partition(table: ContingencyTable) -> bool:
    """True when one partition is a bijective relabeling of the other."""
    counts = table.counts
    if counts.shape[0] != counts.shape[1]:
        return False
    return (np.count_nonzero(counts, axis=0) == 1).all() and (
        np.count_nonzero(counts, axis=1) == 1
    ).all()


def adjusted_rand_index(y, yhat) -> float:
    """Rand index adjusted for chance; 1 for identical partitions."""
    table = contingency_table(y, yhat)
    if table.n < 2:
        raise ValueError("adjusted_rand_index requires n >= 2")
    # exact integer pair counts
    index = sum(math.comb(int(v), 2) for v in table.counts.flat)
    sum_a = sum(math.comb(int(v), 2) for v in table.row_marginals)
    sum_b = sum(math.comb(int(v), 2) for v in table.col_marginals)
    pairs = math.comb(table.n, 2)
    expected = sum_a * sum_b / pairs
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0 if _is_identical_partition(table) else 0.0
    return (index - expected) / (max_index - expected)


def _entropy(marginals: np.ndarray, n: int) -> float:
    p = marginals[marginals > 0] / n
    return float(-(p * np.log(p)).sum())


def _expected_mutual_info(table: ContingencyTable) -> float:
    """Exact E[MI] under the hypergeometric (fixed-marginal) model."""
    n = table.n
    lg = math.lgamma
    log_n = math.log(n)
    emi = 0.0
    for a in (int(v) for v in table.row_marginals):
        for b in (int(v) for v in table.col_marginals):
            lo = max(1, a + b - n)
            hi = min(a, b)
            # log of the constant part of the hypergeometric pmf
            base = (
                lg(a + 1) + lg(n - a + 1) + lg(b + 1) + lg(n - b + 1) - lg(n + 1)
            )
            for nij in range(lo, hi + 1):
                log_p = base - (
                    lg(nij + 1)
                    + lg(a - nij + 1)
                    + lg(b - nij + 1)
                    + lg(n - a - b + nij + 1)
                )
                emi += (nij / n) * (log_n + math.log(nij / (a * b))) * math.exp(log_p)
    return emi


def adjusted_mutual_info(y, yhat) -> float:
    """Mutual information adjusted by its hypergeometric expectation."""
    table = contingency_table(y, yhat)
    if table.n < 2:
        raise ValueError("adjusted_mutual_info requires n >= 2")
    n = table.n
    counts = table.counts
    mi = 0.0
    for i, j in zip(*np.nonzero(counts)):
        nij = counts[i, j]
        outer = table.row_marginals[i] * table.col_marginals[j]
        mi += (nij / n) * math.log(n * nij / outer)
    h_mean = 0.5 * (_entropy(table.row_marginals, n) + _entropy(table.col_marginals, n))
    emi = _expected_mutual_info(table)
    denom = h_mean - emi
    if abs(denom) < 1e-15:
        return 1.0 if _is_identical_partition(table) else 0.0
    return (mi - emi) / denom


def score_clustering(y, yhat) -> QualityScores:
    """All three quality scores from one label pair."""
    return QualityScores(
        cluster_acc=cluster_accuracy(y, yhat),
        ari=adjusted_rand_index(y, yhat),
        ami=adjusted_mutual_info(y, yhat),
    )


def mean_std(values) -> MeanStd:
    """Arithmetic mean and population standard deviation."""
    v = np.asarray(list(values), dtype=np.float64)
    if v.size == 0:
        raise ValueError("mean_std of empty sequence")
    return MeanStd(mean=float(v.mean()), std=float(v.std()))


def trial_summary(scores) -> TrialSummary:
    """Per-metric mean and population std over repeated trials."""
    scores = list(scores)
    if not scores:
        raise ValueError("trial_summary of no trials")
    return TrialSummary(
        cluster_acc=mean_std(s.cluster_acc for s in scores),
        ari=mean_std(s.ari for s in scores),
        ami=mean_std(s.ami for s in scores),
        trials=len(scores),
    )
