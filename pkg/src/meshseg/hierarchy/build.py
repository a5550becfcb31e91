"""Multi-resolution hierarchy construction (VC, VC+QEM, or FPS)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..graph.neighborhoods import EdgeSet, NeighborhoodConfig, knn_graph, radius_graph
from ..mesh.core import Mesh, geodesic_edge_set
from .fps import fps_pool
from .qem import qem_pool
from .trace import PoolingTraceMap
from .vertex_clustering import pooled_edge_set, vertex_clustering_pool

# Defaults: cubical clustering cells per level, and the quadric-error
# strategy as a clustering pre-pass followed by 30% reductions.
DEFAULT_VC_CELLS = (0.04, 0.08, 0.16, 0.32)
DEFAULT_QEM_RATIO = 0.3

# Radius defaults scale with the cell schedule; the radii themselves are
# not reported anywhere and must be treated as tunables.
DEFAULT_RADII = (0.05, 0.10, 0.20, 0.40)


@dataclass
class HierarchyConfig:
    strategy: str = "vc"  # "vc" | "vc+qem" | "fps"
    cells: Sequence[float] = DEFAULT_VC_CELLS
    qem_ratio: float = DEFAULT_QEM_RATIO
    qem_levels: int = 3
    qem_pair_distance: Optional[float] = None  # defaults to cells[0]
    fps_counts: Sequence[int] = ()
    fps_seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("vc", "vc+qem", "fps"):
            raise ValueError(f"unknown hierarchy strategy {self.strategy!r}")
        if self.strategy == "fps" and not self.fps_counts:
            raise ValueError("fps strategy requires fps_counts")

    @property
    def num_levels(self) -> int:
        if self.strategy == "vc":
            return len(self.cells)
        if self.strategy == "vc+qem":
            return 1 + self.qem_levels
        return len(self.fps_counts)


@dataclass
class Hierarchy:
    """Mesh pyramid plus the trace maps and edge sets linking its levels.

    levels[0] is the finest level the network sees (the first pooling of
    the raw input); input_trace maps raw input vertices onto it.
    """

    levels: List[Mesh]
    traces: List[PoolingTraceMap]
    geodesic_edges: List[EdgeSet]
    euclidean_edges: Optional[List[EdgeSet]] = None
    input_trace: Optional[PoolingTraceMap] = None

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def validate(self):
        if len(self.traces) != len(self.levels) - 1:
            raise ValueError("hierarchy needs exactly one trace per level transition")
        for i in range(len(self.levels) - 1):
            if self.levels[i + 1].num_vertices >= self.levels[i].num_vertices:
                raise ValueError(f"level {i + 1} does not reduce the vertex count")
            t = self.traces[i]
            t.validate()
            if t.fine_count != self.levels[i].num_vertices:
                raise ValueError(f"trace {i} fine size does not match level {i}")
            if t.coarse_count != self.levels[i + 1].num_vertices:
                raise ValueError(f"trace {i} coarse count does not match level {i + 1}")
        for i, edges in enumerate(self.geodesic_edges):
            edges.validate(self.levels[i].num_vertices)

    def build_euclidean_edges(self, configs: Sequence[NeighborhoodConfig]):
        """Build per-level Euclidean edge sets (lazy; overwrites any previous)."""
        if len(configs) != self.num_levels:
            raise ValueError("need one neighborhood config per level")
        edge_sets = []
        for mesh, cfg in zip(self.levels, configs):
            if cfg.kind == "knn":
                edge_sets.append(knn_graph(mesh.positions, cfg.k))
            elif cfg.kind == "radius":
                edge_sets.append(radius_graph(mesh.positions, cfg.radius))
            else:  # geodesic stand-in for the Euclidean branch
                edge_sets.append(self.geodesic_edges[len(edge_sets)])
        self.euclidean_edges = edge_sets
        return self.euclidean_edges


def build_hierarchy(mesh: Mesh, config: HierarchyConfig) -> Hierarchy:
    """Build the fine-to-coarse pyramid for one mesh.

    The first pooling operation (VC cell 0, QEM pre-pass cell, or the first
    FPS count) produces level 0; its trace from the raw input is kept in
    input_trace.
    """
    levels: List[Mesh] = []
    traces: List[PoolingTraceMap] = []
    edge_sets: List[EdgeSet] = []

    current = mesh
    current_edges = geodesic_edge_set(mesh)

    def apply(pool):
        nonlocal current, current_edges
        coarse, trace = pool(current)
        if levels and coarse.num_vertices >= current.num_vertices:
            raise ValueError(
                f"pooling level {len(levels)} failed to reduce the vertex count "
                f"({current.num_vertices} -> {coarse.num_vertices})"
            )
        coarse_edges = pooled_edge_set(current_edges, trace)
        levels.append(coarse)
        edge_sets.append(coarse_edges)
        current, current_edges = coarse, coarse_edges
        return trace

    if config.strategy == "vc":
        steps = [lambda m, s=s: vertex_clustering_pool(m, s) for s in config.cells]
    elif config.strategy == "vc+qem":
        pair_dist = config.qem_pair_distance
        if pair_dist is None:
            pair_dist = config.cells[0]
        steps = [lambda m, s=config.cells[0]: vertex_clustering_pool(m, s)]
        steps += [
            lambda m, r=config.qem_ratio, d=pair_dist: qem_pool(m, r, d)
            for _ in range(config.qem_levels)
        ]
    else:
        steps = [
            lambda m, c=c, s=config.fps_seed: fps_pool(m, c, s)
            for c in config.fps_counts
        ]

    input_trace = apply(steps[0])
    if config.strategy == "fps":
        # FPS discards surface connectivity entirely.
        edge_sets[0] = EdgeSet([np.empty(0, dtype=np.int64)] * levels[0].num_vertices)
        current_edges = edge_sets[0]
    for step in steps[1:]:
        traces.append(apply(step))
        if config.strategy == "fps":
            edge_sets[-1] = EdgeSet(
                [np.empty(0, dtype=np.int64)] * levels[-1].num_vertices
            )
            current_edges = edge_sets[-1]

    hier = Hierarchy(
        levels=levels,
        traces=traces,
        geodesic_edges=edge_sets,
        input_trace=input_trace,
    )
    hier.validate()
    return hier


def merge_hierarchies(hiers: Sequence[Hierarchy]) -> Hierarchy:
    """Disjoint union of hierarchies (used for batching independent crops)."""
    if not hiers:
        raise ValueError("nothing to merge")
    depth = hiers[0].num_levels
    if any(h.num_levels != depth for h in hiers):
        raise ValueError("hierarchies must have matching depth")
    has_euc = all(h.euclidean_edges is not None for h in hiers)

    levels, traces, geo, euc = [], [], [], []
    for lvl in range(depth):
        meshes = [h.levels[lvl] for h in hiers]
        offsets = np.cumsum([0] + [m.num_vertices for m in meshes[:-1]])
        levels.append(_concat_meshes(meshes, offsets))
        geo.append(_concat_edges([h.geodesic_edges[lvl] for h in hiers]))
        if has_euc:
            euc.append(_concat_edges([h.euclidean_edges[lvl] for h in hiers]))
        if lvl < depth - 1:
            coarse_offsets = np.cumsum(
                [0] + [h.levels[lvl + 1].num_vertices for h in hiers[:-1]]
            )
            assignment = np.concatenate(
                [h.traces[lvl].assignment + off for h, off in zip(hiers, coarse_offsets)]
            )
            traces.append(
                PoolingTraceMap(assignment, sum(h.levels[lvl + 1].num_vertices for h in hiers))
            )
    return Hierarchy(levels, traces, geo, euc if has_euc else None)


def _concat_meshes(meshes, offsets):
    def cat(attr):
        vals = [getattr(m, attr) for m in meshes]
        if any(v is None for v in vals):
            return None
        return np.concatenate(vals)

    faces = np.concatenate(
        [m.faces + off for m, off in zip(meshes, offsets)]
    ) if any(m.faces.size for m in meshes) else np.empty((0, 3), dtype=np.int64)
    return Mesh(
        positions=cat("positions"),
        faces=faces,
        colors=cat("colors"),
        normals=cat("normals"),
        labels=cat("labels"),
    )


def _concat_edges(edge_sets):
    neighbors = []
    offset = 0
    for es in edge_sets:
        neighbors.extend(n + offset for n in es.neighbors)
        offset += len(es)
    return EdgeSet(neighbors)
