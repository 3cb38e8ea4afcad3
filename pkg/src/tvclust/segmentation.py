"""Exact optimal contiguous partitioning of an excitation vector, by dynamic programming.

Serves as an independent ground truth for the clustering pipeline and as a
neutral excitation-matching baseline: for a given number of blocks it finds
the contiguous partition minimizing the total within-block squared deviation
from the block means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PartitionResult", "dp_optimal_partition", "oracle_front"]


@dataclass(frozen=True)
class PartitionResult:
    boundaries: tuple  # 1-based start index of each block, first == 1
    cost: float
    q: int

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("partition cost cannot be negative")
        if len(self.boundaries) != self.q or self.q < 1:
            raise ValueError("boundary count must equal q")


def _suffix_tables(w: np.ndarray, q_max: int):
    """Suffix DP over block counts.

    S[k, i] is the optimal cost of splitting w[i:] into k blocks; J[k, i] the
    smallest optimal start of the second block (ties resolved toward the
    lexicographically smallest boundary list).
    """
    n = w.size
    p1 = np.concatenate(([0.0], np.cumsum(w)))
    p2 = np.concatenate(([0.0], np.cumsum(np.abs(w) ** 2)))

    def seg_costs(i: int, j: np.ndarray) -> np.ndarray:
        lengths = j - i
        costs = (p2[j] - p2[i]).real - np.abs(p1[j] - p1[i]) ** 2 / lengths
        costs[lengths == 1] = 0.0  # singleton variance is identically zero
        return np.maximum(costs, 0.0)

    S = np.full((q_max + 1, n + 1), np.inf)
    J = np.zeros((q_max + 1, n + 1), dtype=int)
    S[0, n] = 0.0
    for k in range(1, q_max + 1):
        for i in range(n - k, -1, -1):
            j = np.arange(i + 1, n - k + 2)
            totals = seg_costs(i, j) + S[k - 1, j]
            best = int(np.argmin(totals))  # first minimum = smallest j
            S[k, i] = totals[best]
            J[k, i] = j[best]
    return S, J


def _reconstruct(J: np.ndarray, q: int) -> tuple:
    starts, i = [1], 0
    for k in range(q, 1, -1):
        i = int(J[k, i])
        starts.append(i + 1)
    return tuple(starts)


def dp_optimal_partition(w_ref, q: int) -> PartitionResult:
    """Optimal split of w into q contiguous blocks; O(N^2 q) exact search."""
    w = np.asarray(w_ref, dtype=complex)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("need a non-empty vector")
    if not 1 <= q <= w.size:
        raise ValueError(f"q must lie in [1, {w.size}], got {q}")
    S, J = _suffix_tables(w, q)
    return PartitionResult(_reconstruct(J, q), float(S[q, 0]), q)


def oracle_front(w_ref) -> list:
    """Optimal partitions for every block count q = 1..N; cost non-increasing in q."""
    w = np.asarray(w_ref, dtype=complex)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("need a non-empty vector")
    S, J = _suffix_tables(w, w.size)
    return [
        PartitionResult(_reconstruct(J, q), float(S[q, 0]), q)
        for q in range(1, w.size + 1)
    ]
