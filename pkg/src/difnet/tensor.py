"""Reverse-mode autodiff on dense 2-D double-precision tensors.

Everything downstream (diffusion, GDU cells, the full models) is built on
the handful of operations defined here.  Tensors are strictly 2-D; scalars
are represented as 1x1 tensors and vectors as 1xN row tensors.  There is no
broadcasting: elementwise operations demand exactly equal shapes.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


class ContractError(ValueError):
    """Raised when an operation's calling contract is violated."""


class Tensor:
    """A dense 2-D float64 array participating in a recorded computation.

    Operations build an implicit tape: each result remembers its parent
    tensors and one pullback callable per parent.  ``backward()`` on a 1x1
    tensor replays the tape in reverse topological order and accumulates
    gradients into every ``requires_grad`` tensor's ``grad`` field.
    """

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_pullbacks")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ShapeError(f"tensors are 2-D, got array of ndim {arr.ndim}")
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._pullbacks: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.data.shape != (1, 1):
            raise ContractError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # -- gradient handling ---------------------------------------------------

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Populate ``grad`` of all reachable ``requires_grad`` tensors.

        Repeated calls accumulate.  Raises ``ContractError`` unless this
        tensor is a 1x1 scalar.
        """
        if self.data.shape != (1, 1):
            raise ContractError(f"backward() needs a 1x1 loss, got shape {self.shape}")
        order = _topo_order(self)
        flowing: dict[int, np.ndarray] = {id(self): np.ones((1, 1))}
        for node in reversed(order):
            upstream = flowing.pop(id(node), None)
            if upstream is None:
                continue
            if node.requires_grad:
                if node.grad is None:
                    node.grad = np.zeros_like(node.data)
                node.grad += upstream
            for parent, pullback in zip(node._parents, node._pullbacks):
                if not parent.requires_grad and not parent._parents:
                    continue
                contrib = pullback(upstream)
                slot = flowing.get(id(parent))
                # pullbacks may return views of upstream; never mutate in place
                flowing[id(parent)] = contrib if slot is None else slot + contrib


def _topo_order(root: Tensor) -> list[Tensor]:
    """Deterministic post-order over the recorded graph (iterative DFS)."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node._parents):
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def _from_op(data: np.ndarray,
             parents: Sequence[Tensor],
             pullbacks: Sequence[Callable[[np.ndarray], np.ndarray]]) -> Tensor:
    out = Tensor.__new__(Tensor)
    out.data = data
    out.requires_grad = any(p.requires_grad or p._parents for p in parents)
    out.grad = None
    if out.requires_grad:
        out._parents = tuple(parents)
        out._pullbacks = tuple(pullbacks)
    else:
        out._parents = ()
        out._pullbacks = ()
    return out


def _check_same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")


# -- arithmetic ----------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dimensions of {a.shape} and {b.shape} differ")
    return _from_op(
        a.data @ b.data,
        (a, b),
        (lambda up: up @ b.data.T, lambda up: a.data.T @ up),
    )


def const_matmul(matrix, x: Tensor) -> Tensor:
    """Left-multiply by a constant dense or scipy-sparse matrix.

    The matrix is not a tape participant; gradients flow only into ``x``.
    Used for propagation through a fixed normalized adjacency.
    """
    if matrix.shape[1] != x.rows:
        raise ShapeError(f"const_matmul: inner dimensions of {matrix.shape} and {x.shape} differ")
    mt = matrix.T
    return _from_op(np.asarray(matrix @ x.data), (x,), (lambda up: np.asarray(mt @ up),))


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "add")
    return _from_op(a.data + b.data, (a, b), (lambda up: up, lambda up: up))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")
    return _from_op(a.data - b.data, (a, b), (lambda up: up, lambda up: -up))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "mul")
    return _from_op(a.data * b.data, (a, b),
                    (lambda up: up * b.data, lambda up: up * a.data))


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _from_op(a.data * c, (a,), (lambda up: up * c,))


def one_minus(a: Tensor) -> Tensor:
    return _from_op(1.0 - a.data, (a,), (lambda up: -up,))


def transpose(a: Tensor) -> Tensor:
    return _from_op(a.data.T.copy(), (a,), (lambda up: up.T,))


def sum_all(a: Tensor) -> Tensor:
    return _from_op(np.array([[a.data.sum()]]), (a,),
                    (lambda up: np.full_like(a.data, up[0, 0]),))


def concat_cols(parts: Iterable[Tensor]) -> Tensor:
    parts = list(parts)
    if not parts:
        raise ContractError("concat_cols: need at least one part")
    rows = parts[0].rows
    for p in parts[1:]:
        if p.rows != rows:
            raise ShapeError(f"concat_cols: row counts differ ({rows} vs {p.rows})")
    bounds = np.cumsum([0] + [p.cols for p in parts])

    def slicer(lo: int, hi: int):
        return lambda up: up[:, lo:hi]

    return _from_op(
        np.concatenate([p.data for p in parts], axis=1),
        parts,
        [slicer(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])],
    )


# -- activations ----------------------------------------------------------------


def sigmoid(a: Tensor) -> Tensor:
    with np.errstate(over="ignore"):
        pos = a.data >= 0
        out = np.empty_like(a.data)
        out[pos] = 1.0 / (1.0 + np.exp(-a.data[pos]))
        ez = np.exp(a.data[~pos])
        out[~pos] = ez / (1.0 + ez)
    return _from_op(out, (a,), (lambda up: up * out * (1.0 - out),))


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)
    return _from_op(out, (a,), (lambda up: up * (1.0 - out * out),))


def relu(a: Tensor) -> Tensor:
    out = np.maximum(a.data, 0.0)
    return _from_op(out, (a,), (lambda up: up * (a.data > 0),))


def activation(kind: str, a: Tensor) -> Tensor:
    try:
        return {"sigmoid": sigmoid, "tanh": tanh, "relu": relu}[kind](a)
    except KeyError:
        raise ContractError(f"unknown activation {kind!r}") from None


# -- softmax family ---------------------------------------------------------------


def _softmax_pullback(p: np.ndarray):
    return lambda up: p * (up - (up * p).sum(axis=1, keepdims=True))


def row_softmax(a: Tensor) -> Tensor:
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    return _from_op(p, (a,), (_softmax_pullback(p),))


def masked_softmax_rows(scores: Tensor, mask: np.ndarray) -> Tensor:
    """Row softmax restricted to the mask support; off-support entries are 0.

    Stabilized by subtracting each row's maximum over its support.  A row
    with empty support is rejected.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != scores.shape:
        raise ShapeError(f"masked_softmax_rows: mask {mask.shape} vs scores {scores.shape}")
    row_support = mask.any(axis=1)
    if not row_support.all():
        bad = int(np.flatnonzero(~row_support)[0])
        raise ContractError(f"masked_softmax_rows: mask row {bad} has no support")
    neg = np.where(mask, scores.data, -np.inf)
    shifted = neg - neg.max(axis=1, keepdims=True)
    e = np.where(mask, np.exp(shifted), 0.0)
    p = e / e.sum(axis=1, keepdims=True)
    return _from_op(p, (scores,), (_softmax_pullback(p),))


# -- losses ---------------------------------------------------------------


def masked_nll(probs: Tensor, labels: np.ndarray, idx: np.ndarray) -> Tensor:
    """Cross-entropy of one-hot ``labels`` against probability rows ``probs``,
    summed over the rows listed in ``idx``.  Logs are clamped at 1e-12."""
    labels = np.asarray(labels, dtype=np.float64)
    idx = np.asarray(idx, dtype=np.intp)
    if idx.size == 0:
        raise ContractError("masked_nll: empty index set")
    if labels.shape != probs.shape:
        raise ShapeError(f"masked_nll: labels {labels.shape} vs probs {probs.shape}")
    p = probs.data[idx]
    y = labels[idx]
    clamped = np.maximum(p, 1e-12)
    value = -(y * np.log(clamped)).sum()

    def pullback(up: np.ndarray) -> np.ndarray:
        g = np.zeros_like(probs.data)
        # clamp kills the derivative where p fell below the floor
        live = p >= 1e-12
        np.add.at(g, idx, np.where(live, -y / clamped, 0.0) * up[0, 0])
        return g

    return _from_op(np.array([[value]]), (probs,), (pullback,))


# -- gradient checking ---------------------------------------------------------------


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        p.zero_grad()


def grad_check(f: Callable[[], Tensor], params: Sequence[Tensor], eps: float = 1e-6) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``f`` must be a deterministic scalar-valued function of ``params``.
    Relative error per entry is |a - n| / max(1e-8, |a| + |n|).
    """
    if eps <= 0:
        raise ContractError("grad_check: eps must be positive")
    zero_grads(params)
    loss = f()
    if not np.isfinite(loss.data).all():
        raise ValueError("grad_check: non-finite function value")
    loss.backward()
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]

    def evaluate() -> float:
        value = f().item()
        if not np.isfinite(value):
            raise ValueError("grad_check: non-finite function value during probing")
        return value

    worst = 0.0
    for p, g in zip(params, analytic):
        flat = p.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            fp = evaluate()
            flat[i] = orig - eps
            fm = evaluate()
            flat[i] = orig
            numeric = (fp - fm) / (2.0 * eps)
            rel = abs(gflat[i] - numeric) / max(1e-8, abs(gflat[i]) + abs(numeric))
            worst = max(worst, rel)
    return worst


# -- operator sugar ---------------------------------------------------------------

Tensor.__add__ = lambda self, other: add(self, other)
Tensor.__sub__ = lambda self, other: sub(self, other)
Tensor.__mul__ = lambda self, other: mul(self, other)
Tensor.__matmul__ = lambda self, other: matmul(self, other)
