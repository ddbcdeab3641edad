"""Synthetic data generation, partition-quality metrics, and experiment runs.

The default synthetic specification draws four overlapping Gaussian clouds in
the positive quadrant (counts 100/300/200/150), the benchmark every clustering
method is scored on. Accuracy matches clusters to labels with an optimal
bijection; ARI and NMI come straight from the contingency table.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import clustering
from .dataset import PointSet
from .generators import Generator, make_generator

METHODS = ("kmeans", "em", "hcpc", "hac")


@dataclass(frozen=True)
class ClusterSpec:
    mean: tuple[float, ...]
    sigma: tuple[float, ...]
    count: int

    def __post_init__(self):
        if len(self.mean) != len(self.sigma):
            raise ValueError("mean and sigma must have the same dimension")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("sigma must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class SyntheticSpec:
    clusters: tuple[ClusterSpec, ...]
    seed: int = 0

    def __post_init__(self):
        if not self.clusters:
            raise ValueError("at least one cluster is required")
        dims = {len(c.mean) for c in self.clusters}
        if len(dims) != 1:
            raise ValueError("all clusters must share one dimension")


def default_synthetic_spec(seed: int = 0) -> SyntheticSpec:
    """Four positive-quadrant Gaussian clouds with counts (100, 300, 200, 150)."""
    return SyntheticSpec(
        clusters=(
            ClusterSpec(mean=(8.0, 6.5), sigma=(0.5, 0.5), count=100),
            ClusterSpec(mean=(9.0, 7.5), sigma=(0.4, 0.45), count=300),
            ClusterSpec(mean=(8.5, 9.0), sigma=(0.35, 0.35), count=200),
            ClusterSpec(mean=(8.0, 10.0), sigma=(0.6, 0.6), count=150),
        ),
        seed=seed,
    )


def _box_muller(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via the Box-Muller cosine branch.

    Uses 1-u in (0, 1] so the log never sees zero; one deviate per uniform
    pair keeps the draw count (hence the stream position) easy to reason
    about.
    """
    u1 = 1.0 - rng.random(shape)
    u2 = rng.random(shape)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def generate_dataset(spec: SyntheticSpec) -> PointSet:
    """Draw the labeled synthetic dataset deterministically from spec.seed.

    Uniforms come from the counter-based Philox generator and are shaped into
    normals by Box-Muller, so the same seed reproduces the same points on any
    platform. Points with any coordinate <= 0 are rejected and redrawn (the
    positive-domain generators need the open positive quadrant).
    """
    rng = np.random.Generator(np.random.Philox(spec.seed))
    blocks, labels = [], []
    for label, cs in enumerate(spec.clusters):
        mean = np.asarray(cs.mean, dtype=float)
        sigma = np.asarray(cs.sigma, dtype=float)
        pts = mean + sigma * _box_muller(rng, (cs.count, mean.size))
        bad = (pts <= 0).any(axis=1)
        while bad.any():
            pts[bad] = mean + sigma * _box_muller(rng, (int(bad.sum()), mean.size))
            bad = (pts <= 0).any(axis=1)
        blocks.append(pts)
        labels.append(np.full(cs.count, label))
    return PointSet(points=np.concatenate(blocks), labels=np.concatenate(labels))


# --- partition quality --------------------------------------------------------

def _contingency(a: np.ndarray, b: np.ndarray, ka: int, kb: int) -> np.ndarray:
    table = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def match_clusters(assignments, labels, k: int) -> np.ndarray:
    """Bijection pi (cluster -> label) maximizing the matched count (Hungarian)."""
    a = np.asarray(assignments, dtype=int)
    l = np.asarray(labels, dtype=int)
    if a.shape != l.shape:
        raise ValueError("assignments and labels must have equal length")
    table = _contingency(a, l, k, k)
    rows, cols = linear_sum_assignment(table, maximize=True)
    pi = np.empty(k, dtype=int)
    pi[rows] = cols
    return pi


def accuracy(assignments, labels, k: int) -> float:
    """Fraction correctly classified under the best cluster-to-label bijection."""
    a = np.asarray(assignments, dtype=int)
    l = np.asarray(labels, dtype=int)
    pi = match_clusters(a, l, k)
    return float(np.mean(pi[a] == l))


def adjusted_rand_index(assignments, labels) -> float:
    """Permutation-model adjusted Rand index from the contingency table."""
    a = np.asarray(assignments, dtype=int)
    l = np.asarray(labels, dtype=int)
    if a.shape != l.shape:
        raise ValueError("assignments and labels must have equal length")
    table = _contingency(a, l, int(a.max()) + 1, int(l.max()) + 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(table).sum()
    sum_rows = comb2(table.sum(axis=1)).sum()
    sum_cols = comb2(table.sum(axis=0)).sum()
    total = comb2(a.size)
    expected = sum_rows * sum_cols / total
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:  # both partitions trivial in the same way
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def normalized_mutual_information(assignments, labels) -> float:
    """I(A;L) / sqrt(H(A) H(L)); defined as 1 when both partitions are trivial."""
    a = np.asarray(assignments, dtype=int)
    l = np.asarray(labels, dtype=int)
    if a.shape != l.shape:
        raise ValueError("assignments and labels must have equal length")
    table = _contingency(a, l, int(a.max()) + 1, int(l.max()) + 1).astype(float)
    n = table.sum()
    p = table / n
    pa = p.sum(axis=1)
    pl = p.sum(axis=0)
    ha = -np.sum(pa[pa > 0] * np.log(pa[pa > 0]))
    hl = -np.sum(pl[pl > 0] * np.log(pl[pl > 0]))
    if ha == 0.0 and hl == 0.0:
        return 1.0
    if ha == 0.0 or hl == 0.0:
        return 0.0
    nz = p > 0
    mi = float(np.sum(p[nz] * (np.log(p[nz]) - np.log(np.outer(pa, pl)[nz]))))
    return float(mi / np.sqrt(ha * hl))


# --- experiment orchestration ---------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    """One scored clustering run; sizes and centers are in groundtruth order."""

    method: str
    generator: str
    seed: int
    k: int
    accuracy: float
    adjusted_rand_index: float
    normalized_mutual_information: float
    sizes: np.ndarray
    centers: np.ndarray

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "generator": self.generator,
            "seed": self.seed,
            "k": self.k,
            "accuracy": self.accuracy,
            "adjusted_rand_index": self.adjusted_rand_index,
            "normalized_mutual_information": self.normalized_mutual_information,
            "sizes": self.sizes.tolist(),
            "centers": self.centers.tolist(),
        }


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker cap: explicit argument, else RB_THREADS (0 = auto)."""
    if requested is None:
        raw = os.environ.get("RB_THREADS", "0")
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"RB_THREADS={raw!r} is not an integer") from None
    if requested < 0:
        raise ValueError("worker count must be >= 0")
    return requested if requested > 0 else (os.cpu_count() or 1)


def run_method(method: str, points: np.ndarray, g: Generator, k: int, seed: int,
               linkage: str = "ward", consolidate: bool = True,
               standardize: bool = False) -> clustering.ClusteringResult:
    if method == "kmeans":
        return clustering.kmeans(points, g, k, seed=seed, standardize=standardize)
    if method == "em":
        return clustering.em_gmm(points, g, k, seed=seed, standardize=standardize)[0]
    if method == "hac":
        return clustering.hac(points, g, k, linkage=linkage, standardize=standardize)
    if method == "hcpc":
        return clustering.hcpc(points, g, k, consolidate=consolidate, seed=seed,
                               standardize=standardize)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def evaluate_result(result: clustering.ClusteringResult, labels: np.ndarray,
                    seed: int) -> EvaluationReport:
    """Score a clustering against groundtruth and reorder clusters to match it."""
    k = result.k
    pi = match_clusters(result.assignments, labels, k)
    inverse = np.empty(k, dtype=int)
    inverse[pi] = np.arange(k)
    return EvaluationReport(
        method=result.method,
        generator=result.generator,
        seed=seed,
        k=k,
        accuracy=float(np.mean(pi[result.assignments] == labels)),
        adjusted_rand_index=adjusted_rand_index(result.assignments, labels),
        normalized_mutual_information=normalized_mutual_information(result.assignments, labels),
        sizes=result.sizes[inverse],
        centers=result.centers[inverse],
    )


def run_experiment(
    spec: SyntheticSpec,
    methods,
    generators,
    k: int,
    seeds,
    linkage: str = "ward",
    consolidate: bool = True,
    standardize: bool = False,
    max_workers: int | None = None,
    return_results: bool = False,
):
    """Score every (method, generator, seed) cell on one generated dataset.

    Cells are independent and run on a thread pool capped by max_workers
    (default: the RB_THREADS environment variable, 0 or unset meaning one
    worker per CPU). Results come back in deterministic cell order.
    """
    data = generate_dataset(spec)
    gens = {name: make_generator(name) for name in generators}
    cells = [(m, name, s) for m in methods for name in generators for s in seeds]

    def run_cell(cell):
        method, gen_name, seed = cell
        result = run_method(method, data.points, gens[gen_name], k, seed,
                            linkage=linkage, consolidate=consolidate,
                            standardize=standardize)
        return evaluate_result(result, data.labels, seed), result

    with ThreadPoolExecutor(max_workers=worker_count(max_workers)) as pool:
        outcomes = list(pool.map(run_cell, cells))
    reports = [r for r, _ in outcomes]
    if return_results:
        return reports, [res for _, res in outcomes]
    return reports


def summary_table(reports: list[EvaluationReport], method: str,
                  true_sizes=None) -> str:
    """Mean cluster sizes and accuracy per generator, one row each.

    Mirrors a per-method results table: size columns in groundtruth cluster
    order followed by the accuracy column, averaged over seeds. true_sizes
    (if given) adds the groundtruth row at accuracy 1.
    """
    rows = [r for r in reports if r.method == method]
    if not rows:
        return f"{method}: no runs\n"
    k = rows[0].k
    gens = list(dict.fromkeys(r.generator for r in rows))
    header = ["metric"] + [f"size_{c + 1}" for c in range(k)] + ["accuracy"]
    widths = [max(10, len(h) + 2) for h in header]
    out = [f"method: {method} (mean over {len({r.seed for r in rows})} seeds)"]
    out.append("".join(h.ljust(w) for h, w in zip(header, widths)))
    if true_sizes is not None:
        fields = ["original"] + [f"{int(s)}" for s in true_sizes] + ["1.000"]
        out.append("".join(f.ljust(w) for f, w in zip(fields, widths)))
    for gen in gens:
        cell = [r for r in rows if r.generator == gen]
        sizes = np.mean([r.sizes for r in cell], axis=0)
        acc = float(np.mean([r.accuracy for r in cell]))
        fields = [gen] + [f"{s:.1f}" for s in sizes] + [f"{acc:.3f}"]
        out.append("".join(f.ljust(w) for f, w in zip(fields, widths)))
    return "\n".join(out) + "\n"
