"""Clustering in the embedded geometry: k-means, EM, HAC and HCPC.

All four methods follow the same strategy: map the data through h, run the
plain Euclidean algorithm there, pull assignments back, and report cluster
centers as the metric centroids (H of the embedded means) of the members.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster
from scipy.cluster.hierarchy import linkage as scipy_linkage
from scipy.linalg import solve_triangular

from . import _lloyd
from .errors import NumericalError
from .generators import Generator, embed, unembed
from .geometry import centroid

LINKAGES = ("single", "average", "complete", "ward")

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class ClusteringResult:
    method: str
    generator: str
    k: int
    assignments: np.ndarray
    centers: np.ndarray
    sizes: np.ndarray
    seed: int | None
    iterations: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "generator": self.generator,
            "k": self.k,
            "assignments": self.assignments.tolist(),
            "centers": self.centers.tolist(),
            "sizes": self.sizes.tolist(),
            "seed": self.seed,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class GaussianMixtureModel:
    """Full-covariance mixture fitted in embedded coordinates."""

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood: list[float] = field(default_factory=list)


def _validate_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be between 1 and the {n} points")


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


class _Scaler:
    """Optional z-scoring of embedded coordinates, with exact inversion."""

    def __init__(self, X: np.ndarray, enabled: bool):
        if enabled:
            self.mean = X.mean(axis=0)
            sd = X.std(axis=0)
            if (sd == 0).any():
                raise ValueError("cannot standardize a zero-variance coordinate")
            self.sd = sd
        else:
            self.mean = np.zeros(X.shape[1])
            self.sd = np.ones(X.shape[1])

    def forward(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.sd

    def backward(self, Z: np.ndarray) -> np.ndarray:
        return Z * self.sd + self.mean


def _members_centers(g: Generator, pts: np.ndarray, labels: np.ndarray, k: int,
                     fallback: np.ndarray | None = None) -> np.ndarray:
    """Metric centroid of each cluster's members; fallback rows fill empty clusters."""
    centers = np.full((k, pts.shape[1]), np.nan)
    for c in range(k):
        mask = labels == c
        if mask.any():
            centers[c] = centroid(g, pts[mask])
        elif fallback is not None:
            centers[c] = fallback[c]
    return centers


def kmeans(
    points,
    g: Generator,
    k: int,
    seed: int = 0,
    max_iters: int = 200,
    tol: float = 1e-8,
    standardize: bool = False,
) -> ClusteringResult:
    """Lloyd k-means on the embedded points with k-means++ seeding.

    Empty clusters are repaired by farthest-point reseeding, so every cluster
    in the result is nonempty and its center is the metric centroid of its
    members.
    """
    pts = _as_points(points)
    n_distinct = np.unique(pts, axis=0).shape[0]
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct points")
    _validate_k(k, pts.shape[0])
    X = embed(g, pts)
    scaler = _Scaler(X, standardize)
    Z = scaler.forward(X)
    rng = np.random.default_rng(seed)
    init = _lloyd.kmeans_plus_plus(Z, k, rng)
    _, labels, _, n_iter = _lloyd.lloyd_iterate(Z, init, max_iters, tol)
    return ClusteringResult(
        method="kmeans",
        generator=g.name,
        k=k,
        assignments=labels,
        centers=_members_centers(g, pts, labels, k),
        sizes=np.bincount(labels, minlength=k),
        seed=seed,
        iterations=n_iter,
    )


def _log_gaussian_components(X: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """(n, k) log densities via Cholesky factors."""
    n, d = X.shape
    out = np.empty((n, means.shape[0]))
    for j in range(means.shape[0]):
        try:
            L = np.linalg.cholesky(covs[j])
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"covariance of component {j} is not positive definite") from exc
        sol = solve_triangular(L, (X - means[j]).T, lower=True)
        log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
        out[:, j] = -0.5 * (d * _LOG_2PI + log_det + np.sum(sol**2, axis=0))
    return out


def _m_step(X: np.ndarray, resp: np.ndarray, ridge: float, floor: float):
    n, d = X.shape
    nk = resp.sum(axis=0)
    if (nk <= 0).any() or not np.isfinite(nk).all():
        raise NumericalError("a mixture component lost all posterior mass")
    weights = nk / n
    means = (resp.T @ X) / nk[:, None]
    covs = np.empty((means.shape[0], d, d))
    for j in range(means.shape[0]):
        diff = X - means[j]
        cov = (resp[:, j, None] * diff).T @ diff / nk[j]
        reg = max(ridge * float(np.trace(cov)) / d, floor)
        cov[np.diag_indices(d)] += reg
        covs[j] = cov
    return weights, means, covs


def em_gmm(
    points,
    g: Generator,
    k: int,
    seed: int = 0,
    max_iters: int = 500,
    tol: float = 1e-8,
    standardize: bool = False,
) -> tuple[ClusteringResult, GaussianMixtureModel]:
    """Full-covariance Gaussian mixture fitted to the embedded points by EM.

    Responsibilities are initialized by hard assignment to k-means++ seeds.
    Each M-step covariance receives a ridge of 1e-6 * trace/dim (floored at
    1e-12) on its diagonal. Stops when the relative log-likelihood change
    drops below tol. Hard assignments are maximum-posterior; reported centers
    are metric centroids of the hard members (a component with no hard members
    falls back to its unembedded mean).
    """
    pts = _as_points(points)
    _validate_k(k, pts.shape[0])
    X = embed(g, pts)
    scaler = _Scaler(X, standardize)
    Z = scaler.forward(X)
    rng = np.random.default_rng(seed)
    seeds = _lloyd.kmeans_plus_plus(Z, k, rng)
    hard, _ = _lloyd.assign(Z, seeds)
    resp = np.zeros((Z.shape[0], k))
    resp[np.arange(Z.shape[0]), hard] = 1.0

    trace: list[float] = []
    weights = means = covs = None
    for _ in range(max_iters):
        weights, means, covs = _m_step(Z, resp, ridge=1e-6, floor=1e-12)
        log_comp = _log_gaussian_components(Z, means, covs) + np.log(weights)[None, :]
        log_norm = np.logaddexp.reduce(log_comp, axis=1)
        ll = float(log_norm.sum())
        if not np.isfinite(ll):
            raise NumericalError("non-finite log-likelihood after regularization")
        resp = np.exp(log_comp - log_norm[:, None])
        if trace and abs(ll - trace[-1]) <= tol * max(1.0, abs(trace[-1])):
            trace.append(ll)
            break
        trace.append(ll)

    labels = np.argmax(resp, axis=1)
    fallback = unembed(g, scaler.backward(means))
    model = GaussianMixtureModel(
        weights=weights,
        means=scaler.backward(means),
        covariances=np.array([c * np.outer(scaler.sd, scaler.sd) for c in covs]),
        log_likelihood=trace,
    )
    result = ClusteringResult(
        method="em",
        generator=g.name,
        k=k,
        assignments=labels,
        centers=_members_centers(g, pts, labels, k, fallback=fallback),
        sizes=np.bincount(labels, minlength=k),
        seed=seed,
        iterations=len(trace),
    )
    return result, model


def hac(
    points,
    g: Generator,
    k: int,
    linkage: str = "ward",
    standardize: bool = False,
) -> ClusteringResult:
    """Agglomerative clustering of the embedded points, cut at k clusters.

    Deterministic: no seed. Lance-Williams merging is delegated to
    scipy.cluster.hierarchy.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {', '.join(LINKAGES)}")
    pts = _as_points(points)
    _validate_k(k, pts.shape[0])
    X = embed(g, pts)
    Z = _Scaler(X, standardize).forward(X)
    if pts.shape[0] == 1:
        labels = np.zeros(1, dtype=int)
    else:
        tree = scipy_linkage(Z, method=linkage)
        labels = fcluster(tree, t=k, criterion="maxclust") - 1
    return ClusteringResult(
        method="hac",
        generator=g.name,
        k=k,
        assignments=labels,
        centers=_members_centers(g, pts, labels, k),
        sizes=np.bincount(labels, minlength=k),
        seed=None,
        iterations=0,
    )


def _principal_scores(Z: np.ndarray, n_components: int) -> np.ndarray:
    """Center and project onto the leading eigenvectors of the covariance."""
    centered = Z - Z.mean(axis=0)
    cov = centered.T @ centered / max(1, Z.shape[0] - 1)
    if not np.trace(cov) > 0:
        raise ValueError("zero-variance data: principal components are undefined")
    eigval, eigvec = np.linalg.eigh(cov)
    order = np.argsort(eigval)[::-1][:n_components]
    axes = eigvec[:, order]
    # deterministic sign: largest-magnitude loading of each axis is positive
    flips = np.sign(axes[np.argmax(np.abs(axes), axis=0), np.arange(axes.shape[1])])
    flips[flips == 0] = 1.0
    return centered @ (axes * flips)


def hcpc(
    points,
    g: Generator,
    k: int,
    n_components: int | None = None,
    consolidate: bool = True,
    seed: int = 0,
    standardize: bool = False,
) -> ClusteringResult:
    """Ward tree on principal-component scores of the embedded data, cut at k.

    With consolidate=True the cut partition is refined by k-means (in score
    space, initialized at the cut-cluster means), which can only improve the
    within-cluster objective. The run is deterministic; seed is accepted for
    interface symmetry with the other methods.
    """
    pts = _as_points(points)
    _validate_k(k, pts.shape[0])
    if pts.shape[0] < 2:
        raise ValueError("hcpc needs at least 2 points")
    X = embed(g, pts)
    Z = _Scaler(X, standardize).forward(X)
    dim = Z.shape[1]
    m = dim if n_components is None else n_components
    if not 1 <= m <= dim:
        raise ValueError(f"n_components={m} must be in [1, {dim}]")
    scores = _principal_scores(Z, m)
    tree = scipy_linkage(scores, method="ward")
    labels = fcluster(tree, t=k, criterion="maxclust") - 1
    iterations = 0
    if consolidate:
        init = np.stack([scores[labels == c].mean(axis=0) for c in range(k)])
        _, labels, _, iterations = _lloyd.lloyd_iterate(scores, init, max_iters=200, tol=1e-8)
    return ClusteringResult(
        method="hcpc",
        generator=g.name,
        k=k,
        assignments=labels,
        centers=_members_centers(g, pts, labels, k),
        sizes=np.bincount(labels, minlength=k),
        seed=seed,
        iterations=iterations,
    )
