"""Distances, geodesics, centroids and balls for an embedded Bregman metric.

Every operation reduces to Euclidean geometry after the componentwise
embedding h, so the implementations embed, do flat-space arithmetic, and pull
the answer back with H. All functions are pure and broadcast over leading
axes: points may be single (K,) vectors or stacked (..., K) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .generators import Generator, conjugate, embed, unembed


@dataclass(frozen=True)
class GeodesicSample:
    """One point gamma(t) on the constant-speed geodesic between two endpoints."""

    t: float
    point: np.ndarray


@dataclass(frozen=True)
class Ball:
    """Metric ball: the H-image of a Euclidean ball around h(center)."""

    center: np.ndarray
    radius: float


def _point(x) -> np.ndarray:
    """Coerce to at least one coordinate axis so scalars act as 1-D points."""
    return np.atleast_1d(np.asarray(x, dtype=float))


def squared_distance(g: Generator, x, y):
    """Squared metric distance sum_j (h(x_j) - h(y_j))^2.

    Exposed separately so hot loops (quantization, clustering) skip the sqrt.
    """
    hx = embed(g, _point(x))
    hy = embed(g, _point(y))
    d2 = np.sum((hx - hy) ** 2, axis=-1)
    return float(d2) if np.ndim(d2) == 0 else d2


def distance(g: Generator, x, y):
    """Metric distance: the Euclidean norm of the embedded difference."""
    d = np.sqrt(np.sum((embed(g, _point(x)) - embed(g, _point(y))) ** 2, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def bregman_divergence(g: Generator, x, y):
    """Separable Bregman divergence sum_j phi(x_j) - phi(y_j) - (x_j - y_j) phi'(y_j).

    Nonnegative, zero iff x == y, and generally asymmetric in its arguments.
    """
    ax = _point(x)
    ay = _point(y)
    embed(g, ax)  # domain validation only
    embed(g, ay)
    div = np.sum(g.phi(ax) - g.phi(ay) - (ax - ay) * g.phi_prime(ay), axis=-1)
    return float(div) if np.ndim(div) == 0 else div


def geodesic(g: Generator, x, y, ts) -> list[GeodesicSample]:
    """Sample the geodesic gamma_i(t) = H((1-t) h(x_i) + t h(y_i)) at each t.

    t is restricted to [0, 1]: beyond the segment the embedded line may leave
    h's range (e.g. the exp generator's range is (0, inf)).
    """
    hx = embed(g, _point(x))
    hy = embed(g, _point(y))
    samples = []
    for t in np.atleast_1d(np.asarray(ts, dtype=float)):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"geodesic parameter t={t} outside [0, 1]")
        point = np.asarray(g.h_inverse((1.0 - t) * hx + t * hy))
        samples.append(GeodesicSample(t=float(t), point=point))
    return samples


def centroid(g: Generator, points, weights=None) -> np.ndarray:
    """The unique minimizer of sum_n w_n d(x_n, xi)^2: H of the mean of h(points).

    Weights (if given) must be nonnegative with positive sum; they are
    normalized internally.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.size == 0:
        raise ValueError("centroid of an empty point set")
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (pts.shape[0],):
            raise ValueError(f"weights shape {w.shape} does not match {pts.shape[0]} points")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must not all be zero")
        mean = (w[:, None] * embed(g, pts)).sum(axis=0) / total
    else:
        mean = embed(g, pts).mean(axis=0)
    return unembed(g, mean)


def dual_distance(g: Generator, x, y):
    """The same distance computed in dual coordinates y = phi'(x).

    Equals distance(g, x, y): h*(phi'(x)) = h(x) for the built-in conjugates.
    """
    cp = conjugate(g)
    ax = _point(x)
    ay = _point(y)
    embed(g, ax)  # domain validation
    embed(g, ay)
    ux = cp.h_star(g.phi_prime(ax))
    uy = cp.h_star(g.phi_prime(ay))
    d = np.sqrt(np.sum((ux - uy) ** 2, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def ball_contains(g: Generator, ball: Ball, y) -> bool:
    """Membership test: distance(center, y) <= radius."""
    return bool(distance(g, ball.center, y) <= ball.radius)


def ball_boundary_polyline(g: Generator, ball: Ball, n_samples: int = 256) -> np.ndarray:
    """Sample the ball boundary in the plane (K = 2) for rendering.

    Walks the embedded circle of radius r around h(center) and pulls each
    sample back through H. The circle must lie strictly inside the embedded
    range in both coordinates, otherwise part of the boundary has no preimage.
    """
    center = np.asarray(ball.center, dtype=float)
    if center.shape != (2,):
        raise ValueError("ball boundary rendering requires a 2-D center")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    c = embed(g, center)
    lo, hi = g.embedded_range
    r = float(ball.radius)
    if not (c.min() - r > lo and c.max() + r < hi):
        raise DomainError(
            f"embedded circle of radius {r} around {tuple(c)} exits the embedded "
            f"range ({lo}, {hi}) of {g.name}; the ball boundary is not fully "
            "representable"
        )
    theta = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    ring = c + r * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return np.asarray(g.h_inverse(ring))
