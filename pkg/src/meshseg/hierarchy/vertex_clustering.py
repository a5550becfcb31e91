"""Uniform-grid vertex clustering as a pooling operation."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..graph.neighborhoods import EdgeSet
from ..mesh.core import Mesh, geodesic_edge_set
from .trace import PoolingTraceMap, pool_features, pool_labels


def grid_cell_indices(positions: np.ndarray, cell_size: float) -> np.ndarray:
    """Integer (i, j, k) grid cell per point.

    The grid is anchored at the floor of the bounding-box minimum so that
    cell membership is deterministic and translation by whole meters is
    cell-preserving.
    """
    anchor = np.floor(positions.min(axis=0))
    return np.floor((positions - anchor) / cell_size).astype(np.int64)


def vertex_clustering_pool(
    mesh: Mesh, cell_size: float, fine_edges: Optional[EdgeSet] = None
) -> Tuple[Mesh, PoolingTraceMap]:
    """Group vertices by uniform grid cell; one centroid vertex per cell.

    Coarse features are group means, labels are group majorities. Coarse
    faces are the non-degenerate images of fine faces under the cell
    assignment. Use pooled_edge_set with the returned trace to obtain the
    coarse geodesic edges (two cells are connected iff at least one fine
    edge crossed them).
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    del fine_edges  # cell membership depends on positions only

    cells = grid_cell_indices(mesh.positions, cell_size)
    _, assignment = np.unique(cells, axis=0, return_inverse=True)
    coarse_count = int(assignment.max()) + 1 if assignment.size else 0
    trace = PoolingTraceMap(assignment, coarse_count)

    coarse = Mesh(
        positions=pool_features(mesh.positions, trace, "mean"),
        faces=mapped_faces(mesh.faces, assignment),
        colors=None if mesh.colors is None else pool_features(mesh.colors, trace, "mean"),
        normals=None if mesh.normals is None else _pooled_normals(mesh.normals, trace),
        labels=None if mesh.labels is None else pool_labels(mesh.labels, trace),
    )
    return coarse, trace


def mapped_faces(faces: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    """Faces re-indexed through a vertex assignment, degenerates and duplicates dropped."""
    if faces.size == 0:
        return np.empty((0, 3), dtype=np.int64)
    mapped = assignment[faces]
    a, b, c = mapped[:, 0], mapped[:, 1], mapped[:, 2]
    keep = (a != b) & (b != c) & (a != c)
    mapped = mapped[keep]
    if mapped.size == 0:
        return np.empty((0, 3), dtype=np.int64)
    # Deduplicate up to vertex order within the face.
    key = np.sort(mapped, axis=1)
    _, first = np.unique(key, axis=0, return_index=True)
    return mapped[np.sort(first)]


def pooled_edge_set(fine_edges: EdgeSet, trace: PoolingTraceMap) -> EdgeSet:
    """Coarse adjacency: groups are connected iff some fine edge crosses them."""
    centers, nbrs = fine_edges.flatten()
    ca = trace.assignment[centers]
    cb = trace.assignment[nbrs]
    keep = ca != cb
    pairs = np.stack([ca[keep], cb[keep]], axis=1)
    # Symmetrize: fine edge sets may be directed (e.g. k-nn graphs).
    pairs = np.concatenate([pairs, pairs[:, ::-1]], axis=0)
    if pairs.size:
        pairs = np.unique(pairs, axis=0)
    return EdgeSet.from_pairs(pairs[:, 0], pairs[:, 1], trace.coarse_count) \
        if pairs.size else EdgeSet([np.empty(0, dtype=np.int64)] * trace.coarse_count)


def _pooled_normals(normals: np.ndarray, trace: PoolingTraceMap) -> np.ndarray:
    mean = pool_features(normals, trace, "mean")
    norms = np.linalg.norm(mean, axis=1)
    ok = norms > 1e-12
    mean[ok] /= norms[ok, None]
    mean[~ok] = (0.0, 0.0, 1.0)
    return mean


def derive_geodesic_edges(mesh: Mesh) -> EdgeSet:
    """Face-induced adjacency (re-exported for hierarchy building)."""
    return geodesic_edge_set(mesh)
