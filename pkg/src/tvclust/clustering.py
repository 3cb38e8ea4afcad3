"""Contiguous-cluster extraction from a near-piecewise-constant excitation vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import discrete_gradient

__all__ = ["ClusteredLayout", "extract_clusters", "clustering_factor", "clustered_excitations"]

# Gradient magnitudes at or below this fraction of the solution scale are
# treated as numerical noise: a solver that converged to a constant vector
# never produces exact zeros, only machine-level dust.
NOISE_FLOOR = 1e-8


@dataclass(frozen=True)
class ClusteredLayout:
    """Contiguous partition of element indices with one shared weight per cluster.

    ``boundaries`` holds the 1-based start index of every cluster; the first
    entry is always 1. Clusters never overlap and jointly cover 1..N.
    """

    boundaries: tuple
    cluster_weights: np.ndarray
    n_elements: int

    def __post_init__(self):
        bnd = tuple(int(b) for b in self.boundaries)
        weights = np.asarray(self.cluster_weights, dtype=complex)
        if self.n_elements < 1:
            raise ValueError("n_elements must be positive")
        if len(bnd) < 1 or bnd[0] != 1:
            raise ValueError("first cluster must start at element 1")
        if any(b2 <= b1 for b1, b2 in zip(bnd, bnd[1:])):
            raise ValueError("cluster boundaries must be strictly increasing")
        if bnd[-1] > self.n_elements:
            raise ValueError("cluster boundary exceeds the array size")
        if weights.ndim != 1 or weights.size != len(bnd):
            raise ValueError("need exactly one weight per cluster")
        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "boundaries", bnd)
        object.__setattr__(self, "cluster_weights", weights)

    @property
    def q(self) -> int:
        return len(self.boundaries)

    def slices(self):
        """Per-cluster (start, stop) element ranges, 0-based half-open."""
        starts = [b - 1 for b in self.boundaries]
        stops = starts[1:] + [self.n_elements]
        return list(zip(starts, stops))


def extract_clusters(w_hat, tau: float) -> ClusteredLayout:
    """Place cluster borders where |grad w| exceeds tau times its maximum.

    Each cluster's shared weight is the arithmetic mean of its member
    excitations. A gradient that is zero up to machine noise (relative to the
    excitation scale) yields a single cluster.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly between 0 and 1")
    w = np.asarray(w_hat, dtype=complex)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("need a non-empty excitation vector")
    n = w.size
    if n == 1:
        return ClusteredLayout((1,), w.copy(), 1)

    g = np.abs(discrete_gradient(w)[:-1])
    peak = g.max()
    if peak <= NOISE_FLOOR * np.abs(w).max():
        starts = [1]
    else:
        starts = [1] + [int(i) + 2 for i in np.flatnonzero(g > tau * peak)]
    layout = ClusteredLayout(tuple(starts), np.zeros(len(starts), dtype=complex), n)
    weights = np.array([w[a:b].mean() for a, b in layout.slices()])
    return ClusteredLayout(layout.boundaries, weights, n)


def clustering_factor(layout: ClusteredLayout) -> float:
    """Feed-network complexity ratio: clusters per element, in (0, 1]."""
    return layout.q / layout.n_elements


def clustered_excitations(layout: ClusteredLayout) -> np.ndarray:
    """Expand a layout back to a length-N piecewise-constant excitation vector."""
    out = np.empty(layout.n_elements, dtype=complex)
    for (a, b), weight in zip(layout.slices(), layout.cluster_weights):
        out[a:b] = weight
    return out
