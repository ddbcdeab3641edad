"""Fixed-rate quantization under the embedded metric.

A codebook of N code vectors induces the nearest-code quantizer; its empirical
distortion is the mean squared metric distance between samples and their
codes. Lloyd's iteration alternates the nearest-code partition with per-cell
centroids (which are H of the cell means in embedded coordinates), so the
whole procedure runs as plain Euclidean Lloyd after embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _lloyd
from .generators import Generator, embed, unembed


@dataclass(frozen=True)
class Codebook:
    """N distinct code vectors in the generator's domain."""

    codes: np.ndarray
    generator: Generator

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=float)
        if codes.ndim != 2 or codes.shape[0] < 1:
            raise ValueError("codes must be a nonempty (N, K) array")
        embed(self.generator, codes)
        if np.unique(codes, axis=0).shape[0] != codes.shape[0]:
            raise ValueError("code vectors must be pairwise distinct")
        object.__setattr__(self, "codes", codes)

    @property
    def rate(self) -> int:
        return self.codes.shape[0]


@dataclass(frozen=True)
class QuantizerReport:
    codebook: Codebook
    assignments: np.ndarray
    distortion: float
    iterations: int
    distortion_trace: list[float]

    def to_dict(self) -> dict:
        return {
            "generator": self.codebook.generator.name,
            "codes": self.codebook.codes.tolist(),
            "assignments": self.assignments.tolist(),
            "distortion": self.distortion,
            "iterations": self.iterations,
            "distortion_trace": list(self.distortion_trace),
        }


def quantize(cb: Codebook, x):
    """Nearest code index under the squared metric distance; ties to the lowest index.

    Accepts a single (K,) point (returns int) or an (n, K) batch (returns an array).
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    hx = embed(cb.generator, pts)
    hc = embed(cb.generator, cb.codes)
    labels = np.argmin(np.sum((hx[:, None, :] - hc[None, :, :]) ** 2, axis=2), axis=1)
    return int(labels[0]) if single else labels


def distortion(cb: Codebook, samples) -> float:
    """Mean squared metric distance from each sample to its nearest code."""
    pts = np.asarray(samples, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[0] == 0:
        raise ValueError("distortion of an empty sample set")
    hx = embed(cb.generator, pts)
    hc = embed(cb.generator, cb.codes)
    d2 = np.sum((hx[:, None, :] - hc[None, :, :]) ** 2, axis=2)
    return float(d2.min(axis=1).mean())


def empty_cell_repair(cb: Codebook, assignments, samples) -> Codebook:
    """Reseed codes whose cells are empty at the farthest-from-its-code sample.

    Identity when every cell is occupied. Exposed as the same rule the Lloyd
    loop applies internally, so it can be driven and tested in isolation.
    """
    pts = np.asarray(samples, dtype=float)
    labels = np.asarray(assignments)
    hx = embed(cb.generator, pts)
    hc = embed(cb.generator, cb.codes)
    counts = np.bincount(labels, minlength=cb.rate)
    d2 = np.sum((hx - hc[labels]) ** 2, axis=1)
    repaired, changed = _lloyd.repair_empty(hc, counts, hx, d2)
    if not changed:
        return cb
    return Codebook(codes=unembed(cb.generator, repaired), generator=cb.generator)


def lloyd(
    samples,
    g: Generator,
    rate: int,
    seed: int = 0,
    max_iters: int = 200,
    tol: float = 1e-8,
) -> QuantizerReport:
    """Fit a rate-N codebook by Lloyd iteration, k-means++ seeded in embedded space.

    The seed fully determines the run. Stops at an exact fixed point of the
    assign/update alternation (converged codes are then the centroids of their
    own cells) or when the relative distortion improvement falls below tol.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if rate < 1:
        raise ValueError("rate must be >= 1")
    n_distinct = np.unique(pts, axis=0).shape[0]
    if rate > n_distinct:
        raise ValueError(f"rate {rate} exceeds the {n_distinct} distinct samples")
    X = embed(g, pts)
    rng = np.random.default_rng(seed)
    centers = _lloyd.kmeans_plus_plus(X, rate, rng)
    centers, labels, trace, n_iter = _lloyd.lloyd_iterate(X, centers, max_iters, tol)
    cb = Codebook(codes=unembed(g, centers), generator=g)
    return QuantizerReport(
        codebook=cb,
        assignments=labels,
        distortion=trace[-1],
        iterations=n_iter,
        distortion_trace=trace,
    )
