"""Quadric-error mesh simplification with pooling trace tracking.

Per-vertex quadrics are sums of incident-face plane quadrics p p^T with
p = (a, b, c, d), a^2+b^2+c^2 = 1. Pairs (mesh edges plus non-adjacent
pairs within a distance threshold) are contracted lowest cost first; the
representative is the minimizer of the combined quadric, falling back to
the best of {v1, v2, midpoint} when the 3x3 system is singular.
"""

from __future__ import annotations

import heapq
import warnings
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..mesh.core import Mesh, face_normals_and_areas
from .trace import PoolingTraceMap, pool_features, pool_labels
from .vertex_clustering import mapped_faces, _pooled_normals

_SINGULAR_COND = 1e10


def vertex_quadrics(mesh: Mesh) -> np.ndarray:
    """(V, 4, 4) plane-quadric sums over incident faces."""
    v = mesh.num_vertices
    q = np.zeros((v, 4, 4))
    if mesh.faces.size == 0:
        return q
    normals, areas = face_normals_and_areas(mesh)
    ok = areas > 0
    d = -(normals * mesh.positions[mesh.faces[:, 0]]).sum(axis=1)
    planes = np.concatenate([normals, d[:, None]], axis=1)
    outer = planes[:, :, None] * planes[:, None, :]
    outer[~ok] = 0.0
    for k in range(3):
        np.add.at(q, mesh.faces[:, k], outer)
    return q


def optimal_contraction(q: np.ndarray, v1: np.ndarray, v2: np.ndarray):
    """Minimizer and cost of the combined quadric for one contraction.

    Returns (vbar, cost). Singular systems fall back to the cheapest of
    {v1, v2, midpoint}.
    """
    a = q[:3, :3]
    b = q[:3, 3]

    def cost_at(p):
        h = np.append(p, 1.0)
        return float(h @ q @ h)

    try:
        if np.linalg.cond(a) < _SINGULAR_COND:
            vbar = np.linalg.solve(a, -b)
            return vbar, cost_at(vbar)
    except np.linalg.LinAlgError:
        pass
    candidates = [v1, v2, 0.5 * (v1 + v2)]
    costs = [cost_at(p) for p in candidates]
    best = int(np.argmin(costs))
    return candidates[best], costs[best]


class QemSimplifier:
    """Single-run pair-contraction state (heap, union-find, versions)."""

    def __init__(self, mesh: Mesh, target_count: int, pair_distance_threshold: float = 0.04):
        if not 0 < target_count <= mesh.num_vertices:
            raise ValueError("target_count out of range")
        self.mesh = mesh
        self.target = target_count
        self.n = mesh.num_vertices
        self.pos = mesh.positions.copy()
        self.quadrics = vertex_quadrics(mesh)
        self.alive = np.ones(self.n, dtype=bool)
        self.version = np.zeros(self.n, dtype=np.int64)
        self.parent = np.arange(self.n)
        self.popped_costs = []  # valid contraction costs in pop order
        self.reached_target = True

        nbrs = [set() for _ in range(self.n)]
        for a, b, c in mesh.faces:
            nbrs[a].update((b, c)); nbrs[b].update((a, c)); nbrs[c].update((a, b))
        if pair_distance_threshold > 0 and self.n > 1:
            tree = cKDTree(self.pos)
            for a, b in tree.query_pairs(pair_distance_threshold):
                nbrs[a].add(b); nbrs[b].add(a)
        self.nbrs = nbrs

        self.heap = []
        self._tick = 0
        for a in range(self.n):
            for b in nbrs[a]:
                if a < b:
                    self._push(a, b)

    def _push(self, a, b):
        vbar, cost = optimal_contraction(
            self.quadrics[a] + self.quadrics[b], self.pos[a], self.pos[b]
        )
        self._tick += 1
        heapq.heappush(
            self.heap,
            (cost, self._tick, a, b, self.version[a], self.version[b], vbar),
        )

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def run(self):
        live = int(self.alive.sum())
        while live > self.target and self.heap:
            cost, _, a, b, va, vb, vbar = heapq.heappop(self.heap)
            if not (self.alive[a] and self.alive[b]):
                continue
            if self.version[a] != va or self.version[b] != vb:
                continue  # stale entry
            self.popped_costs.append(cost)
            # Contract b into a.
            self.quadrics[a] = self.quadrics[a] + self.quadrics[b]
            self.pos[a] = vbar
            self.alive[b] = False
            self.parent[b] = a
            self.version[a] += 1
            merged = (self.nbrs[a] | self.nbrs[b]) - {a, b}
            merged = {m for m in merged if self.alive[m]}
            self.nbrs[a] = merged
            for m in merged:
                self.nbrs[m].discard(b)
                self.nbrs[m].add(a)
                self._push(*((a, m) if a < m else (m, a)))
            live -= 1
        if live > self.target:
            self.reached_target = False
            warnings.warn(
                f"qem: candidate pairs exhausted at {live} vertices "
                f"(target {self.target})",
                RuntimeWarning,
            )
        return self._finish()

    def _finish(self) -> Tuple[Mesh, PoolingTraceMap]:
        survivors = np.flatnonzero(self.alive)
        coarse_index = np.full(self.n, -1, dtype=np.int64)
        coarse_index[survivors] = np.arange(len(survivors))
        assignment = coarse_index[[self.find(i) for i in range(self.n)]]
        trace = PoolingTraceMap(assignment, len(survivors))

        mesh = self.mesh
        coarse = Mesh(
            positions=self.pos[survivors],
            faces=mapped_faces(mesh.faces, assignment),
            colors=None if mesh.colors is None else pool_features(mesh.colors, trace, "mean"),
            normals=None if mesh.normals is None else _pooled_normals(mesh.normals, trace),
            labels=None if mesh.labels is None else pool_labels(mesh.labels, trace),
        )
        return coarse, trace


def qem_pool(
    mesh: Mesh,
    target_ratio: float,
    pair_distance_threshold: float = 0.04,
    target_count: Optional[int] = None,
) -> Tuple[Mesh, PoolingTraceMap]:
    """Contract lowest-cost pairs until ceil(target_ratio * V) vertices remain."""
    if target_count is None:
        if not 0 < target_ratio < 1:
            raise ValueError("target_ratio must lie in (0, 1)")
        target_count = int(np.ceil(target_ratio * mesh.num_vertices))
    return QemSimplifier(mesh, target_count, pair_distance_threshold).run()
