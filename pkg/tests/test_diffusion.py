import numpy as np
import pytest

from difnet.data import build_mask
from difnet.diffusion import diffuse, influence_weights
from difnet.synthetic import random_graph
from difnet.tensor import ShapeError, Tensor, grad_check, mul, sum_all
from oracles import diffuse_oracle, influence_weights_oracle


def rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


def graph_and_mask(n, seed, edge_prob=0.4):
    g = random_graph(n, 3, 2, seed=seed, edge_prob=edge_prob)
    return g, build_mask(g)


def test_single_node_is_identity():
    _, mask = graph_and_mask(1, 0)
    h = Tensor([[1.0, 2.0]])
    np.testing.assert_allclose(diffuse(h, mask).data, [[1.0, 2.0]])


def test_identical_rows_are_a_fixed_point():
    _, mask = graph_and_mask(5, 1)
    h = Tensor(np.tile([1.5, -0.5, 2.0], (5, 1)))
    np.testing.assert_allclose(diffuse(h, mask).data, h.data, atol=1e-12)


def test_matches_per_node_oracle():
    _, mask = graph_and_mask(6, 2)
    h = rng(2).normal(size=(6, 4))
    got = diffuse(Tensor(h), mask).data
    np.testing.assert_allclose(got, diffuse_oracle(h, mask.dense()), atol=1e-12)


def test_shape_mismatch_rejected():
    _, mask = graph_and_mask(4, 3)
    with pytest.raises(ShapeError):
        diffuse(Tensor(np.zeros((3, 2))), mask)


# -- influence weights ----------------------------------------------------------------

def test_influence_weights_equal_scores():
    g, _ = graph_and_mask(2, 4, edge_prob=1.0)
    mask = build_mask(g)
    # h_0.h_0 == h_1.h_0, so self and neighbor scores tie
    h = np.array([[1.0, 1.0], [2.0, 0.0]])
    np.testing.assert_allclose(influence_weights(h, mask, 0), [0.5, 0.5])


def test_influence_weights_isolated_node():
    _, mask = graph_and_mask(3, 5, edge_prob=0.0)
    w = influence_weights(rng(5).normal(size=(3, 2)), mask, 1)
    np.testing.assert_array_equal(w, [0.0, 1.0, 0.0])


def test_influence_weights_bounds_check():
    _, mask = graph_and_mask(3, 6)
    with pytest.raises(IndexError):
        influence_weights(np.zeros((3, 2)), mask, 3)


def test_diffuse_rows_equal_influence_weighted_sums():
    _, mask = graph_and_mask(7, 7)
    h = rng(7).normal(size=(7, 3))
    z = diffuse(Tensor(h), mask).data
    for i in range(7):
        np.testing.assert_allclose(z[i], influence_weights(h, mask, i) @ h, atol=1e-12)


def test_influence_weights_match_oracle_over_random_graphs():
    for seed in range(10):
        g, mask = graph_and_mask(8, seed)
        h = rng(seed + 100).normal(size=(8, 4))
        for i in range(8):
            np.testing.assert_allclose(influence_weights(h, mask, i),
                                       influence_weights_oracle(h, mask.dense(), i),
                                       atol=1e-12)


# -- invariants ----------------------------------------------------------------

def test_row_stochastic_on_support():
    for seed in range(5):
        g, mask = graph_and_mask(10, seed)
        h = rng(seed).normal(size=(10, 4)) * 3
        dense = mask.dense()
        for i in range(10):
            w = influence_weights(h, mask, i)
            assert abs(w.sum() - 1.0) < 1e-12
            assert (w[~dense[i]] == 0.0).all()
            assert (w >= 0.0).all()


def test_permutation_equivariance():
    g, mask = graph_and_mask(9, 11)
    h = rng(11).normal(size=(9, 4))
    perm = rng(12).permutation(9)
    dense = mask.dense()
    permuted_mask = type(mask)(support=mask.support[perm][:, perm].tocsr())
    z = diffuse(Tensor(h), mask).data
    z_perm = diffuse(Tensor(h[perm]), permuted_mask).data
    np.testing.assert_allclose(z_perm, z[perm], atol=1e-12)
    assert (permuted_mask.dense() == dense[perm][:, perm]).all()


def test_locality_via_gradients():
    g, mask = graph_and_mask(7, 13)
    dense = mask.dense()
    h = Tensor(rng(13).normal(size=(7, 3)), requires_grad=True)
    for i in range(7):
        h.zero_grad()
        selector = np.zeros((7, 3))
        selector[i] = 1.0
        sum_all(mul(diffuse(h, mask), Tensor(selector))).backward()
        for j in range(7):
            if not dense[i, j]:
                assert (h.grad[j] == 0.0).all()


def test_gradient_matches_finite_differences():
    _, mask = graph_and_mask(6, 14)
    h = Tensor(rng(14).normal(size=(6, 4)), requires_grad=True)
    assert grad_check(lambda: sum_all(diffuse(h, mask)), [h]) < 1e-5


# -- dense / edge-list agreement ----------------------------------------------------------------

def test_paths_agree_forward_and_backward():
    for seed in range(8):
        _, mask = graph_and_mask(10, seed)
        raw = rng(seed + 50).normal(size=(10, 5))

        def run(dense_limit):
            h = Tensor(raw.copy(), requires_grad=True)
            weighted = mul(diffuse(h, mask, dense_limit=dense_limit),
                           Tensor(np.arange(50.0).reshape(10, 5)))
            sum_all(weighted).backward()
            return h.grad.copy(), weighted.data.copy()

        g_dense, z_dense = run(dense_limit=10_000)
        g_sparse, z_sparse = run(dense_limit=0)
        np.testing.assert_allclose(z_dense, z_sparse, atol=1e-12)
        np.testing.assert_allclose(g_dense, g_sparse, atol=1e-12)


def test_sparse_path_gradient_matches_finite_differences():
    _, mask = graph_and_mask(6, 15)
    h = Tensor(rng(15).normal(size=(6, 4)), requires_grad=True)
    assert grad_check(lambda: sum_all(diffuse(h, mask, dense_limit=0)), [h]) < 1e-5
