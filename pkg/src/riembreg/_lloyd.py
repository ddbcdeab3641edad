"""Shared Euclidean Lloyd core: k-means++ seeding, assignment, centroid update.

Both the quantizer and the clustering front ends run this on embedded
coordinates. Reductions use fixed-order numpy accumulation so results do not
depend on any parallel schedule.
"""

from __future__ import annotations

import numpy as np


def kmeans_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seed k centers: first uniform, then proportional to squared distance."""
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]), dtype=float)
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:  # all remaining mass sits on existing centers
            idx = rng.integers(n)
        centers[i] = X[idx]
        np.minimum(d2, np.sum((X - centers[i]) ** 2, axis=1), out=d2)
    return centers


def assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center labels (ties to the lowest index) and squared distances."""
    d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(X.shape[0]), labels]


def repair_empty(
    centers: np.ndarray, counts: np.ndarray, X: np.ndarray, point_d2: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Reseed each empty cell's center at the sample farthest from its own center.

    Cells are repaired in index order; a claimed sample's distance is zeroed so
    two empty cells never grab the same point. Under the assignment that
    produced point_d2 the moved centers served no samples, so the objective is
    unchanged and Lloyd's descent property survives the repair.
    """
    repaired = False
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        centers = centers.copy()
        d2 = point_d2.copy()
        for i in empty:
            j = int(np.argmax(d2))
            centers[i] = X[j]
            d2[j] = 0.0
            repaired = True
    return centers, repaired


def update(
    X: np.ndarray, labels: np.ndarray, centers: np.ndarray, point_d2: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Move each center to the mean of its cell; repair empty cells."""
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(centers)
    np.add.at(sums, labels, X)
    new = centers.copy()
    nonempty = counts > 0
    new[nonempty] = sums[nonempty] / counts[nonempty, None]
    return repair_empty(new, counts, X, point_d2)


def lloyd_iterate(
    X: np.ndarray, centers: np.ndarray, max_iters: int, tol: float
) -> tuple[np.ndarray, np.ndarray, list[float], int]:
    """Alternate assignment and centroid updates from the given initial centers.

    Returns (centers, labels, distortion trace, iterations). The trace holds
    the mean squared distance after every assignment step and is
    non-increasing. Iteration stops at an exact fixed point (labels unchanged,
    nothing repaired) so converged centers are the centroids of their own
    cells, or when the relative trace improvement drops below tol.
    """
    labels, d2 = assign(X, centers)
    trace = [float(d2.mean())]
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        centers, repaired = update(X, labels, centers, d2)
        new_labels, d2 = assign(X, centers)
        trace.append(float(d2.mean()))
        stable = not repaired and np.array_equal(new_labels, labels)
        labels = new_labels
        if stable:
            break
        if trace[-2] - trace[-1] <= tol * max(trace[-2], np.finfo(float).tiny):
            break
    return centers, labels, trace, n_iter
