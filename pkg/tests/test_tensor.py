import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from difnet.tensor import (ContractError, ShapeError, Tensor, add, concat_cols,
                           grad_check, masked_nll, masked_softmax_rows, matmul,
                           mul, one_minus, relu, row_softmax, scale, sigmoid,
                           sub, sum_all, tanh, transpose, zero_grads)
from oracles import masked_softmax_oracle, nll_oracle


def rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


# -- matmul ----------------------------------------------------------------

def test_matmul_identity():
    out = matmul(Tensor(np.eye(2)), Tensor([[3.0], [4.0]]))
    np.testing.assert_array_equal(out.data, [[3.0], [4.0]])


def test_matmul_dot_product():
    out = matmul(Tensor([[1.0, 2.0]]), Tensor([[3.0], [4.0]]))
    assert out.item() == 11.0


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
        matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 2))))


def test_matmul_gradient_matches_finite_differences():
    a = Tensor(rng(1).normal(size=(3, 3)), requires_grad=True)
    b = Tensor(rng(2).normal(size=(3, 3)), requires_grad=True)
    assert grad_check(lambda: sum_all(matmul(a, b)), [a, b]) < 1e-7


# -- elementwise ----------------------------------------------------------------

def test_mul_annihilator():
    out = mul(Tensor([1.0, 2.0, 3.0]), Tensor([0.0, 0.0, 0.0]))
    np.testing.assert_array_equal(out.data, [[0.0, 0.0, 0.0]])


def test_add_values():
    np.testing.assert_array_equal(add(Tensor([1.0, 2.0]), Tensor([3.0, 4.0])).data,
                                  [[4.0, 6.0]])


def test_sub_values():
    np.testing.assert_array_equal(sub(Tensor([1.0, 2.0]), Tensor([3.0, 1.0])).data,
                                  [[-2.0, 1.0]])


@pytest.mark.parametrize("op", [add, sub, mul])
def test_elementwise_rejects_shape_mismatch(op):
    with pytest.raises(ShapeError):
        op(Tensor(np.zeros((2, 2))), Tensor(np.zeros((2, 3))))


def test_mul_gradient_matches_finite_differences():
    a = Tensor(rng(3).normal(size=(4, 4)), requires_grad=True)
    b = Tensor(rng(4).normal(size=(4, 4)), requires_grad=True)
    assert grad_check(lambda: sum_all(mul(a, b)), [a, b]) < 1e-7


# -- concat ----------------------------------------------------------------

def test_concat_two_scalars():
    np.testing.assert_array_equal(concat_cols([Tensor([[1.0]]), Tensor([[2.0]])]).data,
                                  [[1.0, 2.0]])


def test_concat_three_blocks_in_argument_order():
    blocks = [Tensor(np.full((2, 2), float(i))) for i in range(3)]
    out = concat_cols(blocks)
    assert out.shape == (2, 6)
    for i in range(3):
        np.testing.assert_array_equal(out.data[:, 2 * i:2 * i + 2], blocks[i].data)


def test_concat_backward_is_linear():
    a = Tensor(rng(5).normal(size=(2, 3)), requires_grad=True)
    b = Tensor(rng(6).normal(size=(2, 1)), requires_grad=True)
    sum_all(concat_cols([a, b])).backward()
    np.testing.assert_array_equal(a.grad, np.ones((2, 3)))
    np.testing.assert_array_equal(b.grad, np.ones((2, 1)))


def test_concat_rejects_row_mismatch():
    with pytest.raises(ShapeError):
        concat_cols([Tensor(np.zeros((2, 1))), Tensor(np.zeros((3, 1)))])


# -- activations ----------------------------------------------------------------

def test_sigmoid_at_zero():
    assert sigmoid(Tensor([[0.0]])).item() == 0.5


def test_tanh_at_zero():
    assert tanh(Tensor([[0.0]])).item() == 0.0


def test_sigmoid_range_and_extremes():
    out = sigmoid(Tensor([[-1000.0, 1000.0]])).data
    assert 0.0 <= out[0, 0] < 1e-12 and 1.0 - 1e-12 < out[0, 1] <= 1.0


@pytest.mark.parametrize("act", [sigmoid, tanh, relu])
def test_activation_gradients_match_finite_differences(act):
    x = Tensor(rng(7).normal(size=(4, 4)), requires_grad=True)
    assert grad_check(lambda: sum_all(act(x)), [x]) < 1e-7


# -- masked softmax ----------------------------------------------------------------

def test_masked_softmax_singleton_support():
    mask = np.eye(3, dtype=bool)
    out = masked_softmax_rows(Tensor(rng(8).normal(size=(3, 3))), mask)
    np.testing.assert_array_equal(out.data, np.eye(3))


def test_masked_softmax_uniform_scores():
    mask = np.array([[1, 1, 1, 0], [1, 1, 0, 0], [1, 0, 0, 0], [1, 1, 1, 1]], dtype=bool)
    out = masked_softmax_rows(Tensor(np.zeros((4, 4))), mask).data
    for i, k in enumerate(mask.sum(axis=1)):
        np.testing.assert_allclose(out[i][mask[i]], 1.0 / k)
        assert (out[i][~mask[i]] == 0.0).all()


def test_masked_softmax_matches_loop_oracle():
    r = rng(9)
    scores = r.normal(size=(5, 5))
    mask = r.random((5, 5)) < 0.5
    np.fill_diagonal(mask, True)
    out = masked_softmax_rows(Tensor(scores), mask).data
    np.testing.assert_allclose(out, masked_softmax_oracle(scores, mask), atol=1e-12)


def test_masked_softmax_rows_sum_to_one_and_zero_off_support():
    r = rng(10)
    scores = r.normal(size=(8, 8)) * 50
    mask = r.random((8, 8)) < 0.4
    np.fill_diagonal(mask, True)
    out = masked_softmax_rows(Tensor(scores), mask).data
    np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)
    assert (out[~mask] == 0.0).all()


def test_masked_softmax_rejects_empty_row_naming_it():
    mask = np.ones((3, 3), dtype=bool)
    mask[1] = False
    with pytest.raises(ContractError, match="row 1"):
        masked_softmax_rows(Tensor(np.zeros((3, 3))), mask)


def test_masked_softmax_gradient_matches_finite_differences():
    r = rng(11)
    mask = r.random((4, 4)) < 0.6
    np.fill_diagonal(mask, True)
    x = Tensor(r.normal(size=(4, 4)), requires_grad=True)
    coeffs = Tensor(r.normal(size=(4, 4)))
    assert grad_check(lambda: sum_all(mul(masked_softmax_rows(x, mask),
                                          coeffs)), [x]) < 1e-6


# -- backward ----------------------------------------------------------------

def test_backward_linear_functional():
    w = Tensor(rng(12).normal(size=(2, 2)), requires_grad=True)
    sum_all(w).backward()
    np.testing.assert_array_equal(w.grad, np.ones((2, 2)))


def test_backward_sigmoid_closed_form():
    w = Tensor(rng(13).normal(size=(2, 2)), requires_grad=True)
    sum_all(sigmoid(w)).backward()
    s = 1.0 / (1.0 + np.exp(-w.data))
    np.testing.assert_allclose(w.grad, s * (1 - s), atol=1e-15)


def test_backward_rejects_non_scalar():
    with pytest.raises(ContractError):
        Tensor(np.zeros((2, 2)), requires_grad=True).backward()


def test_backward_accumulates_across_calls():
    w = Tensor(rng(14).normal(size=(2, 2)), requires_grad=True)
    loss = sum_all(w)
    loss.backward()
    loss.backward()
    np.testing.assert_array_equal(w.grad, 2 * np.ones((2, 2)))
    zero_grads([w])
    assert w.grad is None


def test_backward_is_deterministic_bitwise():
    def grads():
        r = rng(15)
        a = Tensor(r.normal(size=(4, 4)), requires_grad=True)
        b = Tensor(r.normal(size=(4, 4)), requires_grad=True)
        loss = sum_all(mul(sigmoid(matmul(a, b)), tanh(add(a, b))))
        loss.backward()
        return a.grad.tobytes(), b.grad.tobytes()

    assert grads() == grads()


def test_diamond_graph_accumulates_both_paths():
    # y = a*a + a  =>  dy/da = 2a + 1
    a = Tensor([[3.0]], requires_grad=True)
    sum_all(add(mul(a, a), a)).backward()
    assert a.grad[0, 0] == 7.0


# -- scalar helpers ----------------------------------------------------------------

def test_scale_one_minus_transpose():
    x = Tensor(rng(16).normal(size=(2, 3)), requires_grad=True)
    np.testing.assert_allclose(scale(x, 2.0).data, 2 * x.data)
    np.testing.assert_allclose(one_minus(x).data, 1 - x.data)
    np.testing.assert_allclose(transpose(x).data, x.data.T)
    assert grad_check(lambda: sum_all(scale(transpose(one_minus(x)), 0.5)), [x]) < 1e-9


# -- masked_nll ----------------------------------------------------------------

def test_masked_nll_matches_loop_oracle():
    r = rng(17)
    logits = r.normal(size=(6, 4))
    probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    labels = np.eye(4)[r.integers(0, 4, size=6)]
    idx = np.array([0, 2, 5])
    out = masked_nll(Tensor(probs), labels, idx)
    assert abs(out.item() - nll_oracle(probs, labels, idx)) < 1e-10


def test_masked_nll_rejects_empty_index():
    with pytest.raises(ContractError):
        masked_nll(Tensor(np.full((2, 2), 0.5)), np.eye(2), np.array([], dtype=int))


# -- grad_check itself ----------------------------------------------------------------

def test_grad_check_quadratic_is_nearly_exact():
    a = Tensor(rng(18).normal(size=(3, 3)), requires_grad=True)
    q = Tensor(rng(19).normal(size=(3, 3)))
    # quadratic: central differences have no truncation error, only roundoff
    assert grad_check(lambda: sum_all(mul(matmul(a, q), a)), [a], eps=1e-4) < 1e-9


def test_grad_check_rejects_bad_eps():
    a = Tensor([[1.0]], requires_grad=True)
    with pytest.raises(ContractError):
        grad_check(lambda: sum_all(a), [a], eps=0.0)


# -- shape algebra property ----------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 6), k=st.integers(1, 6), n=st.integers(1, 6),
       extra=st.integers(1, 6))
def test_shape_algebra_is_closed(m, k, n, extra):
    a = Tensor(np.zeros((m, k)))
    b = Tensor(np.zeros((k, n)))
    assert matmul(a, b).shape == (m, n)
    assert transpose(a).shape == (k, m)
    assert concat_cols([a, Tensor(np.zeros((m, extra)))]).shape == (m, k + extra)
    assert add(a, a).shape == (m, k)
    assert sum_all(a).shape == (1, 1)
    assert sigmoid(a).shape == (m, k)
    assert row_softmax(a).shape == (m, k)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 8), n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_generic_composition_gradient(m, n, seed):
    r = np.random.Generator(np.random.Philox(seed))
    x = Tensor(r.normal(size=(m, n)), requires_grad=True)
    w = Tensor(r.normal(size=(n, m)), requires_grad=True)
    f = lambda: sum_all(tanh(matmul(sigmoid(x), w)))
    assert grad_check(f, [x, w]) < 1e-5
