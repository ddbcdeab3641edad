"""Matplotlib renderings saved to files: cluster scatters and raster images."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from .voronoi import PALETTE, VoronoiRaster

_CMAP = ListedColormap(PALETTE)


def save_cluster_scatter(path, points: np.ndarray, assignments: np.ndarray,
                         centers: np.ndarray | None = None, title: str | None = None) -> None:
    """Point cloud colored by cluster with centers marked as black crosses."""
    fig, ax = plt.subplots(figsize=(5, 5))
    colors = [PALETTE[int(a) % len(PALETTE)] for a in assignments]
    ax.scatter(points[:, 0], points[:, 1], c=colors, s=12, alpha=0.7, linewidths=0)
    if centers is not None:
        finite = np.isfinite(centers).all(axis=1)
        ax.scatter(centers[finite, 0], centers[finite, 1], c="black", marker="x",
                   s=120, linewidths=2.5)
    if title:
        ax.set_title(title)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_raster_png(path, raster: VoronoiRaster, sites: np.ndarray | None = None,
                    title: str | None = None) -> None:
    """Raster labels as an image in data coordinates (row 0 is the bbox bottom)."""
    x_lo, x_hi, y_lo, y_hi = raster.bbox
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(raster.labels % len(PALETTE), cmap=_CMAP, vmin=0, vmax=len(PALETTE) - 1,
              origin="lower", extent=(x_lo, x_hi, y_lo, y_hi), interpolation="nearest")
    if sites is not None:
        ax.scatter(sites[:, 0], sites[:, 1], c="black", marker="o", s=25)
    if title:
        ax.set_title(title)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
