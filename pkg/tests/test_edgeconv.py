import numpy as np
import pytest

from meshseg.graph.neighborhoods import EdgeSet
from meshseg.nn.edgeconv import DualBlock, EdgeConvBranch, prepared_edges


def random_edge_set(rng, num_vertices, max_degree=4):
    neighbors = []
    for i in range(num_vertices):
        deg = int(rng.integers(1, max_degree + 1))
        others = np.setdiff1d(np.arange(num_vertices), [i])
        neighbors.append(rng.choice(others, size=min(deg, len(others)), replace=False))
    centers = np.repeat(np.arange(num_vertices), [len(n) for n in neighbors])
    return EdgeSet.from_pairs(centers, np.concatenate(neighbors), num_vertices)


def branch_oracle(branch, x, edges):
    """Per-vertex mean of phi over neighbor edges, one edge at a time."""
    outputs = np.zeros((x.shape[0], branch.out_width))
    for i, nbrs in enumerate(edges.neighbors):
        nbrs = nbrs if len(nbrs) else np.asarray([i])
        rows = []
        for j in nbrs:
            diff = x[j] - x[i]
            h = diff if branch.relative else np.concatenate([x[i], diff])
            rows.append(branch.phi.forward(h[None, :], train=False)[0])
        outputs[i] = np.mean(rows, axis=0)
    return outputs


def test_prepared_edges_flatten_and_inverse_counts(rng):
    edges = EdgeSet.from_pairs([0, 0, 2], [1, 2, 0], 3)
    centers, nbrs, inv = prepared_edges(edges)
    # Vertex 1 has no neighbors and receives a self loop.
    assert centers.tolist() == [0, 0, 1, 2]
    assert nbrs.tolist() == [1, 2, 1, 0]
    assert np.allclose(inv, [0.5, 1.0, 1.0])


def test_forward_matches_double_loop_oracle(rng):
    # Eval mode so that phi is a fixed deterministic function of its input
    # row, which makes the edge-at-a-time oracle exact.
    x = rng.normal(size=(12, 5))
    edges = random_edge_set(rng, 12)
    for relative in (False, True):
        branch = EdgeConvBranch(5, 8, 6, rng, relative=relative)
        got = branch.forward(x, *prepared_edges(edges), train=False)
        assert np.allclose(got, branch_oracle(branch, x, edges), atol=1e-12)


def test_equal_features_relative_branch_is_constant(rng):
    # All vertices identical: every difference is zero, so each output row
    # equals phi(0) regardless of the graph.
    x = np.tile(rng.normal(size=(1, 4)), (9, 1))
    edges = random_edge_set(rng, 9)
    branch = EdgeConvBranch(4, 6, 3, rng, relative=True)
    got = branch.forward(x, *prepared_edges(edges), train=False)
    expected = branch.phi.forward(np.zeros((1, 4)), train=False)[0]
    assert np.allclose(got, np.tile(expected, (9, 1)), atol=1e-12)


def test_neighbor_order_invariance(rng):
    x = rng.normal(size=(10, 3))
    edges = random_edge_set(rng, 10)
    shuffled = EdgeSet([np.asarray(rng.permutation(n)) for n in edges.neighbors])
    branch = EdgeConvBranch(3, 5, 4, rng)
    a = branch.forward(x, *prepared_edges(edges), train=False)
    b = branch.forward(x, *prepared_edges(shuffled), train=False)
    assert np.allclose(a, b, atol=1e-12)


def test_duplicated_neighbor_lists_leave_output_unchanged(rng):
    # Mean aggregation: repeating every neighbor the same number of times
    # does not change the per-vertex average.
    x = rng.normal(size=(8, 3))
    edges = random_edge_set(rng, 8)
    doubled = EdgeSet([np.concatenate([n, n]) for n in edges.neighbors])
    branch = EdgeConvBranch(3, 4, 4, rng)
    a = branch.forward(x, *prepared_edges(edges), train=False)
    b = branch.forward(x, *prepared_edges(doubled), train=False)
    assert np.allclose(a, b, atol=1e-12)


def test_relative_branch_translation_invariance(rng):
    x = rng.normal(size=(10, 4))
    edges = random_edge_set(rng, 10)
    branch = EdgeConvBranch(4, 6, 5, rng, relative=True)
    prep = prepared_edges(edges)
    a = branch.forward(x, *prep, train=False)
    b = branch.forward(x + rng.normal(size=(1, 4)) * 10, *prep, train=False)
    assert np.allclose(a, b, atol=1e-9)


def test_plain_branch_is_not_translation_invariant(rng):
    x = rng.normal(size=(10, 4))
    edges = random_edge_set(rng, 10)
    branch = EdgeConvBranch(4, 6, 5, rng, relative=False)
    prep = prepared_edges(edges)
    a = branch.forward(x, *prep, train=False)
    b = branch.forward(x + 10.0, *prep, train=False)
    assert not np.allclose(a, b, atol=1e-6)


def test_dual_block_concatenates_branches(rng):
    x = rng.normal(size=(11, 4))
    geo, euc = random_edge_set(rng, 11), random_edge_set(rng, 11)
    block = DualBlock(4, (6, 3), (5, 2), rng)
    got = block.forward(x, prepared_edges(geo), prepared_edges(euc), train=False)
    expected = np.concatenate(
        [branch_oracle(block.geodesic, x, geo), branch_oracle(block.euclidean, x, euc)],
        axis=1,
    )
    assert got.shape == (11, 5)
    assert np.allclose(got, expected, atol=1e-12)


def test_dual_block_residual_when_widths_match(rng):
    x = rng.normal(size=(7, 6))
    geo, euc = random_edge_set(rng, 7), random_edge_set(rng, 7)
    block = DualBlock(6, (4, 3), (4, 3), rng)
    assert block.residual
    got = block.forward(x, prepared_edges(geo), prepared_edges(euc), train=False)
    expected = x + np.concatenate(
        [branch_oracle(block.geodesic, x, geo), branch_oracle(block.euclidean, x, euc)],
        axis=1,
    )
    assert np.allclose(got, expected, atol=1e-12)


def test_zero_width_branch_reduces_to_single(rng):
    x = rng.normal(size=(9, 3))
    geo, euc = random_edge_set(rng, 9), random_edge_set(rng, 9)
    block = DualBlock(3, (5, 4), (0, 0), rng)
    assert block.euclidean is None
    got = block.forward(x, prepared_edges(geo), prepared_edges(euc), train=False)
    assert np.allclose(got, branch_oracle(block.geodesic, x, geo), atol=1e-12)
    with pytest.raises(ValueError):
        DualBlock(3, (5, 0), (5, 0), rng)


@pytest.mark.parametrize("relative", [False, True])
def test_branch_backward_matches_fd(rng, relative):
    x = rng.normal(size=(8, 3))
    edges = random_edge_set(rng, 8)
    prep = prepared_edges(edges)
    branch = EdgeConvBranch(3, 4, 3, rng, relative=relative)

    def loss():
        return float(np.sin(branch.forward(x, *prep, train=True)).sum())

    out = branch.forward(x, *prep, train=True)
    for _, p in branch.parameters():
        p.grad[...] = 0.0
    dx = branch.backward(np.cos(out))

    h = 1e-6
    tensors = [("x", x, dx)] + [(n, p.value, p.grad) for n, p in branch.parameters()]
    for _, value, grad in tensors:
        flat, gflat = value.reshape(-1), grad.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            up = loss()
            flat[k] = orig - h
            down = loss()
            flat[k] = orig
            num = (up - down) / (2 * h)
            assert abs(num - gflat[k]) / max(abs(num), abs(gflat[k]), 1e-2) < 1e-5


def test_dual_block_backward_matches_fd(rng):
    x = rng.normal(size=(6, 5))
    geo = prepared_edges(random_edge_set(rng, 6))
    euc = prepared_edges(random_edge_set(rng, 6))
    block = DualBlock(5, (4, 3), (4, 2), rng)
    assert block.residual

    def loss():
        return float(np.sin(block.forward(x, geo, euc, train=True)).sum())

    out = block.forward(x, geo, euc, train=True)
    for _, p in block.parameters():
        p.grad[...] = 0.0
    dx = block.backward(np.cos(out))

    h = 1e-6
    tensors = [("x", x, dx)] + [(n, p.value, p.grad) for n, p in block.parameters()]
    for _, value, grad in tensors:
        flat, gflat = value.reshape(-1), grad.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            up = loss()
            flat[k] = orig - h
            down = loss()
            flat[k] = orig
            num = (up - down) / (2 * h)
            assert abs(num - gflat[k]) / max(abs(num), abs(gflat[k]), 1e-2) < 1e-5
