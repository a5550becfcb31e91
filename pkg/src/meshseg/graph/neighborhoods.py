"""Euclidean neighbor graphs over 3D points (k-nn and radius)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.spatial import cKDTree


class EdgeSet:
    """Directed per-vertex neighbor lists (center -> neighbor)."""

    def __init__(self, neighbors: List[np.ndarray]):
        self.neighbors = [np.asarray(n, dtype=np.int64) for n in neighbors]

    def __len__(self):
        return len(self.neighbors)

    def __eq__(self, other):
        return len(self) == len(other) and all(
            np.array_equal(np.sort(a), np.sort(b))
            for a, b in zip(self.neighbors, other.neighbors)
        )

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self.neighbors)

    def flatten(self):
        """Return (centers, neighbors) index arrays over all directed edges."""
        counts = np.array([len(n) for n in self.neighbors], dtype=np.int64)
        centers = np.repeat(np.arange(len(self.neighbors), dtype=np.int64), counts)
        if self.neighbors:
            nbrs = np.concatenate(self.neighbors)
        else:
            nbrs = np.empty(0, dtype=np.int64)
        return centers, nbrs.astype(np.int64)

    @classmethod
    def from_pairs(cls, centers, neighbors, num_vertices: int) -> "EdgeSet":
        centers = np.asarray(centers, dtype=np.int64)
        neighbors = np.asarray(neighbors, dtype=np.int64)
        order = np.argsort(centers, kind="stable")
        centers, neighbors = centers[order], neighbors[order]
        lists = [np.empty(0, dtype=np.int64)] * num_vertices
        if centers.size:
            splits = np.flatnonzero(np.diff(centers)) + 1
            groups = np.split(neighbors, splits)
            starts = centers[np.concatenate([[0], splits])]
            for c, g in zip(starts, groups):
                lists[c] = g
        return cls(lists)

    def validate(self, num_vertices: Optional[int] = None):
        n = num_vertices if num_vertices is not None else len(self.neighbors)
        for i, nbrs in enumerate(self.neighbors):
            if nbrs.size and (nbrs.min() < 0 or nbrs.max() >= n):
                raise ValueError(f"edge index out of range at vertex {i}")


@dataclass
class NeighborhoodConfig:
    """How to build the Euclidean edge set of one mesh level."""

    kind: str = "radius"          # "geodesic" | "knn" | "radius"
    k: int = 8
    radius: float = 0.1
    res_threshold: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("geodesic", "knn", "radius"):
            raise ValueError(f"unknown neighborhood kind {self.kind!r}")
        if self.kind == "knn" and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.kind == "radius" and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.res_threshold is not None and self.res_threshold < 1:
            raise ValueError("res_threshold must be >= 1")


def knn_graph(points: np.ndarray, k: int) -> EdgeSet:
    """k nearest neighbors per point, self excluded, ties broken by lower index."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(points)
    if k >= n:
        raise ValueError(f"k={k} must be smaller than the point count {n}")
    tree = cKDTree(points)
    # Query k+1 to account for the self hit, then resolve ties deterministically.
    dists, idx = tree.query(points, k=k + 1)
    neighbors = []
    for i in range(n):
        cand_idx = idx[i]
        cand_d = dists[i]
        keep = cand_idx != i
        cand_idx, cand_d = cand_idx[keep], cand_d[keep]
        # Re-sort by (distance, index) so equal distances prefer lower indices.
        # The kd-tree tie order is unspecified, so pull in every point at the
        # cutoff distance before selecting.
        cutoff = cand_d[k - 1] if len(cand_d) >= k else np.inf
        extra = tree.query_ball_point(points[i], cutoff * (1 + 1e-12))
        cand = np.unique(np.concatenate([cand_idx, np.asarray(extra, dtype=np.int64)]))
        cand = cand[cand != i]
        d = np.linalg.norm(points[cand] - points[i], axis=1)
        order = np.lexsort((cand, d))
        neighbors.append(cand[order[:k]])
    return EdgeSet(neighbors)


def radius_graph(points: np.ndarray, r: float) -> EdgeSet:
    """All points within distance r, self excluded.

    A point with no neighbor in range gets a single self-loop so the
    edge-convolution mean stays defined.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    tree = cKDTree(points)
    lists = tree.query_ball_tree(tree, r)
    neighbors = []
    for i, lst in enumerate(lists):
        nbrs = np.asarray([j for j in lst if j != i], dtype=np.int64)
        if nbrs.size == 0:
            nbrs = np.asarray([i], dtype=np.int64)
        neighbors.append(np.sort(nbrs))
    return EdgeSet(neighbors)
