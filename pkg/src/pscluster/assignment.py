"""Minimum-cost assignment on a square matrix (Hungarian algorithm).

Potentials formulation with shortest augmenting paths, O(n^3).  Costs here
are small integers (contingency counts), for which the float arithmetic is
exact.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")


def min_cost_assignment(cost: np.ndarray) -> np.ndarray:
    """Return col[i] = column assigned to row i minimizing total cost."""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got {cost.shape}")
    n = cost.shape[0]
    # 1-based potentials u (rows), v (cols); p[j] = row matched to column j
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        if p[j]:
            col_of_row[p[j] - 1] = j - 1
    return col_of_row


def max_weight_assignment(weight: np.ndarray) -> np.ndarray:
    """Maximum-weight variant: minimize the negated matrix."""
    return min_cost_assignment(-np.asarray(weight, dtype=np.float64))
