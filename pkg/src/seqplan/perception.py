"""Synthetic scene perception: drift correction, clustering and box fitting.

Labels come from per-point ground truth rather than a learned model;
``label_clusters`` takes the majority label of each cluster.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import EmptyCluster
from .world import SceneObject, Scene

# defaults in scene units; not given by any source, exposed for tuning
DEFAULT_BANDWIDTH = 0.1
DEFAULT_RADIUS = 0.05
DEFAULT_MIN_POINTS = 10


def as_cloud(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"point cloud must be N x 3, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("point cloud has non-finite coordinates")
    return pts


def density_shift(cloud, bandwidth: float = DEFAULT_BANDWIDTH, iterations: int = 1) -> np.ndarray:
    """Flat-kernel mean shift: move each point to the mean of the input points within ``bandwidth``."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    data = as_cloud(cloud)
    tree = cKDTree(data)
    current = data.copy()
    for _ in range(iterations):
        nxt = np.empty_like(current)
        for i, nbrs in enumerate(tree.query_ball_point(current, bandwidth)):
            # a shifted point can land outside every window; leave it where it is
            nxt[i] = data[nbrs].mean(axis=0) if nbrs else current[i]
        current = nxt
    return current


def cluster_points(cloud, radius: float = DEFAULT_RADIUS, min_points: int = DEFAULT_MIN_POINTS) -> list[np.ndarray]:
    """Connected components of the ``radius`` neighbor graph, dropping components below ``min_points``.

    Clusters are returned as sorted index arrays, ordered by their smallest index.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if min_points < 1:
        raise ValueError("min_points must be at least 1")
    pts = as_cloud(cloud)
    n = len(pts)
    if n == 0:
        return []
    pairs = cKDTree(pts).query_pairs(radius, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    clusters = [np.flatnonzero(comp == c) for c in np.unique(comp)]
    clusters = [c for c in clusters if len(c) >= min_points]
    return sorted(clusters, key=lambda c: int(c[0]))


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box kept as exact corners; size and center derive from them."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    @property
    def size(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lo) + np.asarray(self.hi)) / 2

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def shrunk(self, axis: int, eps: float) -> "BoundingBox":
        """Same center, ``size[axis]`` reduced by ``eps``."""
        lo, hi = list(self.lo), list(self.hi)
        lo[axis] += eps / 2
        hi[axis] -= eps / 2
        return BoundingBox(tuple(lo), tuple(hi))

    def to_json(self) -> dict:
        return {"size": self.size.tolist(), "center": self.center.tolist()}


def fit_box(cloud, indices: Sequence[int]) -> BoundingBox:
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        raise EmptyCluster("cannot fit a box to an empty cluster")
    pts = as_cloud(cloud)[idx]
    return BoundingBox(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


@dataclass(frozen=True)
class LabeledBox:
    label: str
    box: BoundingBox
    point_indices: tuple[int, ...]

    def to_json(self) -> dict:
        return {"label": self.label, **self.box.to_json()}

    def to_scene_object(self, name: str | None = None, kind: str = "cube") -> SceneObject:
        return SceneObject(name or self.label, tuple(self.box.size), tuple(self.box.center), kind, self.label)


def label_clusters(cloud, labels: Sequence[str], clusters: Sequence[Sequence[int]]) -> list[LabeledBox]:
    """Majority ground-truth label per cluster (ties go to the alphabetically first label)."""
    out = []
    for c in clusters:
        votes = Counter(labels[i] for i in c)
        best = max(votes.values())
        label = min(l for l, v in votes.items() if v == best)
        out.append(LabeledBox(label, fit_box(cloud, c), tuple(int(i) for i in c)))
    return out


def perceive(cloud, labels: Sequence[str], bandwidth: float = DEFAULT_BANDWIDTH, iterations: int = 1,
             radius: float = DEFAULT_RADIUS, min_points: int = DEFAULT_MIN_POINTS) -> list[LabeledBox]:
    """Shift, cluster, fit and label in one go."""
    shifted = density_shift(cloud, bandwidth, iterations)
    clusters = cluster_points(shifted, radius, min_points)
    return label_clusters(shifted, labels, clusters)


def boxes_to_scene(boxes: Sequence[LabeledBox], kind: str = "cube", room: int | None = None) -> Scene:
    """Scene with one object per box. Repeated labels get numbered names (``A``, ``A#2``, ...)."""
    seen: Counter = Counter()
    objects = []
    for b in boxes:
        seen[b.label] += 1
        name = b.label if seen[b.label] == 1 else f"{b.label}#{seen[b.label]}"
        objects.append(b.to_scene_object(name, kind))
    return Scene(objects, room)


def read_cloud(path: str | Path) -> tuple[np.ndarray, list[str] | None]:
    """Read ``x y z [label]`` lines. Labels are returned only if every line has one."""
    pts, labels = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        pts.append([float(v) for v in parts[:3]])
        labels.append(" ".join(parts[3:]) or None)
    cloud = as_cloud(pts) if pts else np.zeros((0, 3))
    return cloud, (labels if labels and all(labels) else None)


def write_cloud(path: str | Path, cloud, labels: Sequence[str] | None = None) -> None:
    pts = as_cloud(cloud)
    with open(path, "w", encoding="utf-8") as fh:
        for i, (x, y, z) in enumerate(pts):
            tail = f" {labels[i]}" if labels is not None else ""
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}{tail}\n")


def write_boxes(path: str | Path, boxes: Sequence[LabeledBox]) -> None:
    Path(path).write_text(json.dumps([b.to_json() for b in boxes], indent=2), encoding="utf-8")
