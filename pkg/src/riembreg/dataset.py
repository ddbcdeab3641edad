"""Labeled point sets and their CSV form (header x1..xK plus optional label)."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointSet:
    """N points, optionally carrying integer groundtruth labels."""

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, K) array")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels length must match the number of points")
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = [f"x{j + 1}" for j in range(self.dim)]
            if self.labels is not None:
                header.append("label")
            writer.writerow(header)
            for i in range(self.n):
                row = [repr(float(v)) for v in self.points[i]]
                if self.labels is not None:
                    row.append(str(int(self.labels[i])))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty CSV") from None
            header = [c.strip() for c in header]
            has_label = bool(header) and header[-1] == "label"
            n_coords = len(header) - (1 if has_label else 0)
            if n_coords < 1 or any(h != f"x{j + 1}" for j, h in enumerate(header[:n_coords])):
                raise ValueError(f"{path}: expected header x1,...,xK[,label], got {header}")
            points, labels = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise ValueError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
                try:
                    points.append([float(v) for v in row[:n_coords]])
                    if has_label:
                        labels.append(int(row[-1]))
                except ValueError:
                    raise ValueError(f"{path}: row {lineno} is not numeric: {row}") from None
        if not points:
            raise ValueError(f"{path}: no data rows")
        return cls(points=np.asarray(points), labels=np.asarray(labels) if has_label else None)


def save_assignments_csv(path, points: np.ndarray, assignments: np.ndarray,
                         labels: np.ndarray | None = None) -> None:
    """Write one row per point: coordinates, assignment, optional groundtruth."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{j + 1}" for j in range(points.shape[1])] + ["assignment"]
        if labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(points.shape[0]):
            row = [repr(float(v)) for v in points[i]] + [str(int(assignments[i]))]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)
