"""Finite-difference gradient suite over every differentiable component.

Each entry builds a small deterministic instance, differentiates the sum of
its output analytically, and compares against central differences.  The CLI
``gradcheck`` subcommand runs the whole suite and fails on any relative
error above 1e-5.
"""

from __future__ import annotations

import numpy as np

from .data import build_mask, normalized_adjacency
from .diffusion import diffuse
from .gcn import Gcn
from .gdu import GduParamsFull, GduParamsSimplified, gdu_full, gdu_simplified
from .model import DifNet, ModelConfig
from .synthetic import toy_graph
from .tensor import Tensor, grad_check, masked_nll, sum_all

TOLERANCE = 1e-5


def _rng(seed: int = 3) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def check_gdu_full(d: int = 4, n: int = 3, seed: int = 3) -> float:
    rng = _rng(seed)
    p = GduParamsFull.init(d, rng)
    x_res, z, h = (Tensor(rng.normal(size=(n, d)), requires_grad=True) for _ in range(3))
    params = [p.w_f, p.w_e, p.w_u, p.w_g, p.w_r, x_res, z, h]
    return grad_check(lambda: sum_all(gdu_full(p, x_res, z, h)), params)


def check_gdu_simplified(d: int = 4, n: int = 3, seed: int = 4) -> float:
    rng = _rng(seed)
    p = GduParamsSimplified.init(d, rng)
    x_res, z, h = (Tensor(rng.normal(size=(n, d)), requires_grad=True) for _ in range(3))
    params = [p.w_f, p.w_e, p.w_u, p.w_res, p.w_g, x_res, z, h]
    return grad_check(lambda: sum_all(gdu_simplified(p, x_res, z, h)), params)


def check_diffusion(n: int = 6, d: int = 4, seed: int = 5) -> float:
    g = toy_graph(seed)
    mask = build_mask(g)
    h = Tensor(_rng(seed).normal(size=(n, d)), requires_grad=True)
    return grad_check(lambda: sum_all(diffuse(h, mask)), [h])


def check_difnet(depth: int = 3, hidden: int = 4, seed: int = 7,
                 eps: float = 1e-5) -> float:
    # eps=1e-5 balances truncation against f64 roundoff: the end-to-end loss
    # has gate gradients around 1e-5 whose central differences drown in
    # cancellation noise at smaller steps.
    g = toy_graph(seed)
    mask = build_mask(g)
    adj = normalized_adjacency(g)
    cfg = ModelConfig(depth=depth, hidden=hidden, dropout=0.0, seed=seed)
    model = DifNet(g.feature_dim, g.num_classes, cfg)
    params = [p for _, p in model.parameters()]
    train_idx = np.arange(g.node_count)

    def f() -> Tensor:
        probs = model.forward(g.features, mask, adj, training=False)
        return masked_nll(probs, g.labels, train_idx)

    return grad_check(f, params, eps=eps)


def check_gcn(depth: int = 3, hidden: int = 4, seed: int = 8) -> float:
    g = toy_graph(seed)
    adj = normalized_adjacency(g)
    model = Gcn(g.feature_dim, g.num_classes, depth=depth, hidden=hidden,
                dropout_rate=0.0, seed=seed)
    params = [p for _, p in model.parameters()]
    train_idx = np.arange(g.node_count)

    def f() -> Tensor:
        probs = model.forward(g.features, adj, training=False)
        return masked_nll(probs, g.labels, train_idx)

    return grad_check(f, params)


def run_suite() -> list[tuple[str, float]]:
    return [
        ("gdu_full", check_gdu_full()),
        ("gdu_simplified", check_gdu_simplified()),
        ("diffusion", check_diffusion()),
        ("difnet", check_difnet()),
        ("gcn", check_gcn()),
    ]
