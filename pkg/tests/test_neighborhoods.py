import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshseg.graph.neighborhoods import EdgeSet, NeighborhoodConfig, knn_graph, radius_graph


def brute_knn(points, k):
    n = len(points)
    out = []
    for i in range(n):
        d = np.linalg.norm(points - points[i], axis=1)
        order = np.lexsort((np.arange(n), d))
        order = order[order != i]
        out.append(np.sort(order[:k]))
    return out


def brute_radius(points, r):
    n = len(points)
    out = []
    for i in range(n):
        d = np.linalg.norm(points - points[i], axis=1)
        nbrs = np.flatnonzero((d <= r) & (np.arange(n) != i))
        out.append(nbrs)
    return out


def test_knn_matches_brute_force(rng):
    for _ in range(10):
        points = rng.uniform(0, 1, (60, 3))
        k = int(rng.integers(1, 8))
        edges = knn_graph(points, k)
        oracle = brute_knn(points, k)
        for i in range(60):
            assert np.array_equal(np.sort(edges.neighbors[i]), oracle[i])


def test_knn_tie_break_prefers_lower_index():
    # Four points at equal distance 1 from the origin; k=2 must pick the
    # two lowest indices among the tied candidates.
    points = np.array([
        [0, 0, 0.0],
        [1, 0, 0.0],
        [0, 1, 0.0],
        [-1, 0, 0.0],
        [0, -1, 0.0],
    ])
    edges = knn_graph(points, 2)
    assert np.array_equal(np.sort(edges.neighbors[0]), [1, 2])


def test_knn_excludes_self(rng):
    points = rng.uniform(0, 1, (30, 3))
    edges = knn_graph(points, 5)
    for i, nbrs in enumerate(edges.neighbors):
        assert i not in nbrs
        assert len(nbrs) == 5


def test_knn_k_too_large_raises(rng):
    with pytest.raises(ValueError):
        knn_graph(rng.uniform(0, 1, (4, 3)), 4)


def test_radius_matches_brute_force(rng):
    for _ in range(10):
        points = rng.uniform(0, 1, (60, 3))
        r = float(rng.uniform(0.1, 0.4))
        edges = radius_graph(points, r)
        oracle = brute_radius(points, r)
        for i in range(60):
            if len(oracle[i]) == 0:
                assert np.array_equal(edges.neighbors[i], [i])  # self-loop fallback
            else:
                assert np.array_equal(np.sort(edges.neighbors[i]), oracle[i])


def test_radius_isolated_point_gets_self_loop():
    points = np.array([[0, 0, 0.0], [10, 0, 0], [10.1, 0, 0]])
    edges = radius_graph(points, 0.5)
    assert np.array_equal(edges.neighbors[0], [0])
    assert np.array_equal(edges.neighbors[1], [2])


def test_knn_deterministic(rng):
    points = rng.uniform(0, 1, (50, 3))
    a = knn_graph(points, 6)
    b = knn_graph(points, 6)
    assert all(np.array_equal(x, y) for x, y in zip(a.neighbors, b.neighbors))


def test_neighborhood_config_validation():
    with pytest.raises(ValueError):
        NeighborhoodConfig(kind="bogus")
    with pytest.raises(ValueError):
        NeighborhoodConfig(kind="knn", k=0)
    with pytest.raises(ValueError):
        NeighborhoodConfig(kind="radius", radius=0.0)


@given(st.lists(st.lists(st.integers(0, 19), max_size=6), min_size=1, max_size=20))
@settings(max_examples=200, deadline=None)
def test_edge_set_flatten_from_pairs_round_trip(lists):
    edges = EdgeSet([np.asarray(l, dtype=np.int64) for l in lists])
    centers, nbrs = edges.flatten()
    back = EdgeSet.from_pairs(centers, nbrs, len(lists))
    assert back == edges


def test_edge_set_validate_range():
    edges = EdgeSet([np.array([0, 3])])
    with pytest.raises(ValueError):
        edges.validate(2)
    edges.validate(4)


def test_edge_set_num_edges():
    edges = EdgeSet([np.array([1, 2]), np.array([0]), np.empty(0, dtype=np.int64)])
    assert edges.num_edges == 3
    assert len(edges) == 3
