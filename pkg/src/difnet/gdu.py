"""Gated diffusive unit, in full and simplified form.

The cell maps three inputs of hidden width ``d`` to the next hidden state:

* ``z``     — the diffused neighborhood representation,
* ``h``     — the node's lower-layer state,
* ``x_res`` — the graph residual term.

All functions operate on row-stacked matrices (one node per row), which is
equivalent to applying the cell vector-by-vector.

Full cell:
    f = sigmoid(W_f [x_res|z|h])          adjustment gate, z_adj = f * z
    e = sigmoid(W_e [x_res|z|h])          evolving gate,   h_adj = e * h
    g, r = sigmoid(W_{g,r} [x_res|z|h|z_adj|h_adj])        selection gates
    out = sum over the four (z or z_adj) x (h or h_adj) combinations of
          gate-product * tanh(W_u [x_res|.|.]), with one shared W_u.

Simplified cell (drops r, shrinks g):
    g = sigmoid(W_g [z_adj|h_adj])
    out = tanh(g * W_u [z_adj|h_adj] + (1-g) * W_u [z|h] + W_res x_res)

Because the four gate products of the full cell partition 1, its output is
a convex combination of tanh values; both variants therefore stay in
(-1, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .tensor import (ShapeError, Tensor, concat_cols, matmul, mul, one_minus,
                     sigmoid, tanh, transpose)


def glorot(rng: np.random.Generator, out_dim: int, in_dim: int) -> Tensor:
    """Uniform Glorot-initialized trainable weight of shape out_dim x in_dim."""
    bound = np.sqrt(6.0 / (in_dim + out_dim))
    return Tensor(rng.uniform(-bound, bound, size=(out_dim, in_dim)), requires_grad=True)


@dataclass
class GduParamsFull:
    w_f: Tensor  # d x 3d
    w_e: Tensor  # d x 3d
    w_u: Tensor  # d x 3d, shared across the four candidate branches
    w_g: Tensor  # d x 5d
    w_r: Tensor  # d x 5d

    @classmethod
    def init(cls, d: int, rng: np.random.Generator) -> "GduParamsFull":
        return cls(w_f=glorot(rng, d, 3 * d), w_e=glorot(rng, d, 3 * d),
                   w_u=glorot(rng, d, 3 * d), w_g=glorot(rng, d, 5 * d),
                   w_r=glorot(rng, d, 5 * d))


@dataclass
class GduParamsSimplified:
    w_f: Tensor      # d x 3d
    w_e: Tensor      # d x 3d
    w_u: Tensor      # d x 2d
    w_res: Tensor    # d x d residual projection; shareable across layers
    w_g: Tensor      # d x 2d

    @classmethod
    def init(cls, d: int, rng: np.random.Generator,
             w_res: Tensor | None = None) -> "GduParamsSimplified":
        return cls(w_f=glorot(rng, d, 3 * d), w_e=glorot(rng, d, 3 * d),
                   w_u=glorot(rng, d, 2 * d),
                   w_res=w_res if w_res is not None else glorot(rng, d, d),
                   w_g=glorot(rng, d, 2 * d))


GduParams = GduParamsFull | GduParamsSimplified


def _check_inputs(x_res: Tensor, z: Tensor, h: Tensor) -> None:
    if not (x_res.shape == z.shape == h.shape):
        raise ShapeError(f"gdu: input shapes differ: x_res {x_res.shape}, "
                         f"z {z.shape}, h {h.shape}")


def _linear(x: Tensor, w: Tensor) -> Tensor:
    return matmul(x, transpose(w))


def _adjusted(p: GduParams, x_res: Tensor, z: Tensor, h: Tensor):
    """Adjustment/evolving gates and the adjusted z, h (shared by both variants)."""
    ctx = concat_cols([x_res, z, h])
    f = sigmoid(_linear(ctx, p.w_f))
    e = sigmoid(_linear(ctx, p.w_e))
    return ctx, f, e, mul(f, z), mul(e, h)


def gdu_full(p: GduParamsFull, x_res: Tensor, z: Tensor, h: Tensor) -> Tensor:
    _check_inputs(x_res, z, h)
    ctx, _, _, z_adj, h_adj = _adjusted(p, x_res, z, h)
    wide = concat_cols([ctx, z_adj, h_adj])
    g = sigmoid(_linear(wide, p.w_g))
    r = sigmoid(_linear(wide, p.w_r))

    def candidate(zz: Tensor, hh: Tensor) -> Tensor:
        return tanh(_linear(concat_cols([x_res, zz, hh]), p.w_u))

    return (mul(g, r) * candidate(z_adj, h_adj)
            + mul(one_minus(g), r) * candidate(z, h_adj)
            + mul(g, one_minus(r)) * candidate(z_adj, h)
            + mul(one_minus(g), one_minus(r)) * candidate(z, h))


def gdu_simplified(p: GduParamsSimplified, x_res: Tensor, z: Tensor, h: Tensor) -> Tensor:
    _check_inputs(x_res, z, h)
    _, _, _, z_adj, h_adj = _adjusted(p, x_res, z, h)
    adjusted = concat_cols([z_adj, h_adj])
    g = sigmoid(_linear(adjusted, p.w_g))
    mixed = (g * _linear(adjusted, p.w_u)
             + one_minus(g) * _linear(concat_cols([z, h]), p.w_u)
             + _linear(x_res, p.w_res))
    return tanh(mixed)


def gdu(p: GduParams, x_res: Tensor, z: Tensor, h: Tensor) -> Tensor:
    if isinstance(p, GduParamsFull):
        return gdu_full(p, x_res, z, h)
    return gdu_simplified(p, x_res, z, h)


def gate_values(p: GduParams, x_res: Tensor, z: Tensor, h: Tensor) -> dict[str, np.ndarray]:
    """Gate activations for inspection: f, e, g and (full cell only) r."""
    _check_inputs(x_res, z, h)
    ctx, f, e, z_adj, h_adj = _adjusted(p, x_res, z, h)
    gates = {"f": f.data.copy(), "e": e.data.copy()}
    if isinstance(p, GduParamsFull):
        wide = concat_cols([ctx, z_adj, h_adj])
        gates["g"] = sigmoid(_linear(wide, p.w_g)).data.copy()
        gates["r"] = sigmoid(_linear(wide, p.w_r)).data.copy()
    else:
        gates["g"] = sigmoid(_linear(concat_cols([z_adj, h_adj]), p.w_g)).data.copy()
    return gates


def param_list(p: GduParams, prefix: str = "") -> list[tuple[str, Tensor]]:
    return [(prefix + f.name, getattr(p, f.name)) for f in fields(p)]
