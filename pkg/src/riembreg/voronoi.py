"""Voronoi partitions induced by a generator, in four flavors.

Flavors differ only in the per-site dissimilarity:
  left         argmin_i  divergence(x, y_i)
  right        argmin_i  divergence(y_i, x)
  symmetrized  argmin_i  (divergence(x, y_i) + divergence(y_i, x)) / 2
  riemann      argmin_i  metric distance d(x, y_i)

The riemann diagram is the H-pullback of the ordinary Euclidean diagram of
the embedded sites, which is what exact_riemann_cells constructs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .generators import Generator, embed

FLAVORS = ("left", "right", "symmetrized", "riemann")

# 16-color palette shared by the SVG and PNG renderers, cycled by site index.
PALETTE = (
    "#4363d8", "#e6194b", "#3cb44b", "#911eb4",
    "#f58231", "#46f0f0", "#f032e6", "#bcf60c",
    "#fabebe", "#008080", "#e6beff", "#9a6324",
    "#fffac8", "#800000", "#aaffc3", "#808000",
)

BBox = tuple[float, float, float, float]  # (x_lo, x_hi, y_lo, y_hi)


@dataclass(frozen=True)
class SiteSet:
    """Distinct sites in the generator's domain."""

    sites: np.ndarray
    generator: Generator

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=float)
        if sites.ndim != 2 or sites.shape[0] < 1:
            raise ValueError("sites must be a nonempty (n, K) array")
        embed(self.generator, sites)  # domain validation
        if np.unique(sites, axis=0).shape[0] != sites.shape[0]:
            raise ValueError("sites must be pairwise distinct")
        object.__setattr__(self, "sites", sites)

    @property
    def n(self) -> int:
        return self.sites.shape[0]


@dataclass(frozen=True)
class VoronoiRaster:
    """Per-pixel nearest-site labels on a grid over bbox.

    labels has shape (height, width); row i covers the horizontal strip whose
    center is y_lo + (i + 0.5) * dy, i.e. row 0 is the bottom of the bbox.
    """

    bbox: BBox
    width: int
    height: int
    labels: np.ndarray
    flavor: str


def _dissimilarities(g: Generator, points: np.ndarray, sites: np.ndarray, flavor: str) -> np.ndarray:
    """(P, n) matrix of the flavor's dissimilarity from each point to each site."""
    if flavor == "riemann":
        hp = embed(g, points)
        hs = embed(g, sites)
        return np.sum((hp[:, None, :] - hs[None, :, :]) ** 2, axis=2)
    phi_p = g.phi(points)
    phi_s = g.phi(sites)
    grad_s = g.phi_prime(sites)
    grad_p = g.phi_prime(points)
    if flavor == "left":
        # divergence(x, y_i) = Phi(x) + [y_i . grad(y_i) - Phi(y_i)] - x . grad(y_i)
        a = phi_p.sum(axis=1)
        b = np.sum(sites * grad_s - phi_s, axis=1)
        return a[:, None] + b[None, :] - points @ grad_s.T
    if flavor == "right":
        a = np.sum(points * grad_p - phi_p, axis=1)
        b = phi_s.sum(axis=1)
        return a[:, None] + b[None, :] - grad_p @ sites.T
    if flavor == "symmetrized":
        return 0.5 * (
            _dissimilarities(g, points, sites, "left")
            + _dissimilarities(g, points, sites, "right")
        )
    raise ValueError(f"unknown flavor {flavor!r}; expected one of {', '.join(FLAVORS)}")


def classify_points(points, sites: SiteSet, flavor: str = "riemann") -> np.ndarray:
    """Nearest-site index for each point; ties go to the lowest site index."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    embed(sites.generator, pts)  # domain validation
    diss = _dissimilarities(sites.generator, pts, sites.sites, flavor)
    return np.argmin(diss, axis=1)


def classify(point, sites: SiteSet, flavor: str = "riemann") -> int:
    return int(classify_points(np.asarray(point, dtype=float)[None, :], sites, flavor)[0])


def _validate_bbox(g: Generator, bbox: BBox) -> None:
    x_lo, x_hi, y_lo, y_hi = bbox
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError(f"degenerate bbox {bbox}")
    lo, hi = g.domain
    for v in bbox:
        if not (lo <= v <= hi):  # closure: pixel centers stay interior
            raise DomainError(f"bbox corner {v} outside the closure of {g.name}'s domain")


def rasterize(sites: SiteSet, flavor: str, bbox: BBox, width: int, height: int) -> VoronoiRaster:
    """Classify every pixel center of a width x height grid over bbox.

    Pixels are evaluated in row chunks purely as a memory bound; each pixel's
    label depends only on its own center, so the result is independent of
    chunking or evaluation order.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be >= 1")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {', '.join(FLAVORS)}")
    g = sites.generator
    _validate_bbox(g, bbox)
    x_lo, x_hi, y_lo, y_hi = bbox
    xs = x_lo + (np.arange(width) + 0.5) * (x_hi - x_lo) / width
    ys = y_lo + (np.arange(height) + 0.5) * (y_hi - y_lo) / height
    labels = np.empty((height, width), dtype=np.int32)
    chunk = max(1, int(2_000_000 // max(1, width * sites.n)))
    for start in range(0, height, chunk):
        stop = min(start + chunk, height)
        gx, gy = np.meshgrid(xs, ys[start:stop])
        block = np.stack([gx.ravel(), gy.ravel()], axis=1)
        labels[start:stop] = classify_points(block, sites, flavor).reshape(stop - start, width)
    return VoronoiRaster(bbox=bbox, width=width, height=height, labels=labels, flavor=flavor)


# --- exact embedded-space diagram -------------------------------------------

@dataclass(frozen=True)
class CellEdge:
    """One wall of a convex cell in embedded coordinates.

    neighbor is the site index across the wall, or None for a bbox wall.
    polyline samples the wall pulled back through H (original coordinates),
    which is where the straight embedded edge becomes a curve.
    """

    neighbor: int | None
    start: np.ndarray
    end: np.ndarray
    polyline: np.ndarray


@dataclass(frozen=True)
class ExactCell:
    site_index: int
    vertices: np.ndarray  # (m, 2) convex polygon in embedded coordinates; may be empty
    edges: list[CellEdge] = field(default_factory=list)


def _clip_labeled(vertices, labels, normal, offset, new_label):
    """Sutherland-Hodgman clip by normal . u <= offset, tracking edge provenance.

    labels[i] describes the edge leaving vertices[i]; edges created along the
    clip line get new_label.
    """
    out_v: list[np.ndarray] = []
    out_l: list[object] = []
    m = len(vertices)
    for i in range(m):
        va, vb = vertices[i], vertices[(i + 1) % m]
        da = float(normal @ va - offset)
        db = float(normal @ vb - offset)
        if da <= 0.0:
            out_v.append(va)
            out_l.append(labels[i])
            if db > 0.0:
                t = da / (da - db)
                out_v.append(va + t * (vb - va))
                out_l.append(new_label)
        elif db <= 0.0:
            t = da / (da - db)
            out_v.append(va + t * (vb - va))
            out_l.append(labels[i])
    return out_v, out_l


def exact_riemann_cells(
    sites: SiteSet, bbox: BBox, samples_per_edge: int = 64
) -> list[ExactCell]:
    """Euclidean Voronoi cells of the embedded sites, clipped to the embedded bbox.

    Each cell is the intersection of the embedded bbox rectangle with the n-1
    bisector half-planes against the other sites (O(n^2) overall, robust for
    the few hundred sites this is meant for; collinear or cocircular sites need
    no special casing). Every surviving edge is sampled and pulled back
    through H for curved-cell rendering. bbox must lie strictly inside the
    open domain so the pullback is defined on the whole clipped region.
    """
    g = sites.generator
    x_lo, x_hi, y_lo, y_hi = bbox
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError(f"degenerate bbox {bbox}")
    corners = np.array([[x_lo, y_lo], [x_hi, y_lo], [x_hi, y_hi], [x_lo, y_hi]], dtype=float)
    emb_corners = embed(g, corners)  # raises if bbox leaves the open domain
    if sites.sites.shape[1] != 2:
        raise ValueError("exact cells are computed for K = 2 only")
    emb_sites = embed(g, sites.sites)
    if np.unique(emb_sites, axis=0).shape[0] != emb_sites.shape[0]:
        raise ValueError("sites coincide after embedding")
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be >= 2")

    cells = []
    sq_norms = np.sum(emb_sites**2, axis=1)
    for i in range(sites.n):
        verts = [emb_corners[j] for j in range(4)]
        labels: list[object] = [None] * 4
        for j in range(sites.n):
            if j == i or not verts:
                continue
            normal = emb_sites[j] - emb_sites[i]
            offset = 0.5 * (sq_norms[j] - sq_norms[i])
            verts, labels = _clip_labeled(verts, labels, normal, offset, j)
        if not verts:
            cells.append(ExactCell(site_index=i, vertices=np.empty((0, 2))))
            continue
        poly = np.asarray(verts)
        edges = []
        ts = np.linspace(0.0, 1.0, samples_per_edge)[:, None]
        for a in range(len(verts)):
            b = (a + 1) % len(verts)
            seg = (1.0 - ts) * verts[a] + ts * verts[b]
            edges.append(
                CellEdge(
                    neighbor=labels[a],
                    start=verts[a],
                    end=verts[b],
                    polyline=np.asarray(g.h_inverse(seg)),
                )
            )
        cells.append(ExactCell(site_index=i, vertices=poly, edges=edges))
    return cells


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of a simple polygon (positive for counterclockwise)."""
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# --- exporters ---------------------------------------------------------------

def raster_to_pgm(raster: VoronoiRaster, path) -> None:
    """Binary PGM (P5), one byte per pixel holding the site index."""
    labels = raster.labels
    if labels.max(initial=0) > 255:
        raise ValueError("PGM export supports at most 256 sites")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{raster.width} {raster.height}\n255\n".encode("ascii"))
        fh.write(labels[::-1].astype(np.uint8).tobytes())  # top row first


def raster_to_svg(raster: VoronoiRaster, path) -> None:
    """One SVG rect per pixel, filled from the fixed 16-color palette."""
    h, w = raster.labels.shape
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" shape-rendering="crispEdges">',
    ]
    for r in range(h):
        row = raster.labels[h - 1 - r]  # flip: SVG y grows downward
        for c in range(w):
            color = PALETTE[int(row[c]) % len(PALETTE)]
            lines.append(f'<rect x="{c}" y="{r}" width="1" height="1" fill="{color}"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines))


def cells_to_svg(cells: list[ExactCell], sites: SiteSet, bbox: BBox, path, size: int = 512) -> None:
    """Render pulled-back cell walls (curves in original coordinates) plus sites."""
    x_lo, x_hi, y_lo, y_hi = bbox

    def to_svg(pts: np.ndarray) -> np.ndarray:
        sx = (pts[:, 0] - x_lo) / (x_hi - x_lo) * size
        sy = (y_hi - pts[:, 1]) / (y_hi - y_lo) * size
        return np.stack([sx, sy], axis=1)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    for cell in cells:
        color = PALETTE[cell.site_index % len(PALETTE)]
        for edge in cell.edges:
            pts = to_svg(edge.polyline)
            coords = " ".join(f"{p[0]:.3f},{p[1]:.3f}" for p in pts)
            lines.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
    svg_sites = to_svg(sites.sites)
    for i, p in enumerate(svg_sites):
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'<circle cx="{p[0]:.3f}" cy="{p[1]:.3f}" r="4" fill="{color}" stroke="black"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines))
