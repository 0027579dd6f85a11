"""Full DifNet pipeline over a graph.

Embedding -> state initialization -> residual term -> K x (diffusion + GDU)
-> linear projection -> row softmax.  The model owns its parameters and the
seeded streams driving initialization and dropout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import gdu as gdu_mod
from .data import DiffusionMask
from .diffusion import diffuse
from .gdu import GduParams, GduParamsFull, GduParamsSimplified, glorot
from .tensor import (ContractError, Tensor, const_matmul, masked_nll, matmul,
                     mul, row_softmax, transpose)

RESIDUAL_KINDS = ("naive", "raw", "graph_naive", "graph_raw")
GDU_VARIANTS = ("full", "simplified")


@dataclass(frozen=True)
class ModelConfig:
    depth: int
    hidden: int = 16
    gdu_variant: str = "full"
    residual: str = "graph_raw"
    dropout: float = 0.5
    seed: int = 42

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.hidden < 1:
            raise ValueError("hidden size must be at least 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.gdu_variant not in GDU_VARIANTS:
            raise ValueError(f"unknown GDU variant {self.gdu_variant!r}")
        if self.residual not in RESIDUAL_KINDS:
            raise ValueError(f"unknown residual kind {self.residual!r}")


def seeded_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent counter-based generators derived from one seed.

    Stream 0 drives parameter initialization, stream 1 dropout; extra
    streams are available for callers (e.g. sweep workers).
    """
    return [np.random.Generator(np.random.Philox(s))
            for s in np.random.SeedSequence(seed).spawn(count)]


def compute_residual(kind: str, x_emb: Tensor, h: Tensor, adj) -> Tensor:
    """Residual input per layer: current state, embedded features, or either
    propagated through the normalized adjacency."""
    if kind == "naive":
        return h
    if kind == "raw":
        return x_emb
    if kind == "graph_naive":
        return const_matmul(adj, h)
    if kind == "graph_raw":
        return const_matmul(adj, x_emb)
    raise ValueError(f"unknown residual kind {kind!r}")


def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; identity at rate 0."""
    if rate == 0.0:
        return x
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return mul(x, Tensor(keep))


def predict(probs: np.ndarray) -> np.ndarray:
    """Per-row argmax; ties go to the lowest class index."""
    return np.asarray(probs).argmax(axis=1)


def loss(probs: Tensor, labels: np.ndarray, train_idx: np.ndarray) -> Tensor:
    """Summed cross-entropy over the training nodes."""
    return masked_nll(probs, labels, train_idx)


class DifNet:
    """DifNet over a fixed graph shape (feature and label dimensions)."""

    def __init__(self, feature_dim: int, num_classes: int, cfg: ModelConfig):
        self.cfg = cfg
        init_rng, self._dropout_rng = seeded_streams(cfg.seed, 2)
        d = cfg.hidden
        self.w_emb = glorot(init_rng, d, feature_dim)
        self.w_x = glorot(init_rng, d, d)
        if cfg.gdu_variant == "full":
            self.layers: list[GduParams] = [GduParamsFull.init(d, init_rng)
                                            for _ in range(cfg.depth)]
        else:
            # the residual projection is shared across layers
            shared = glorot(init_rng, d, d)
            self.layers = [GduParamsSimplified.init(d, init_rng, w_res=shared)
                           for _ in range(cfg.depth)]
        self.w_fc = glorot(init_rng, num_classes, d)

    def parameters(self) -> list[tuple[str, Tensor]]:
        params = [("w_emb", self.w_emb), ("w_x", self.w_x)]
        seen: set[int] = {id(self.w_emb), id(self.w_x)}
        for k, layer in enumerate(self.layers):
            for name, p in gdu_mod.param_list(layer, prefix=f"layer{k}."):
                if id(p) not in seen:
                    seen.add(id(p))
                    params.append((name, p))
        params.append(("w_fc", self.w_fc))
        return params

    def forward(self, features: np.ndarray, mask: DiffusionMask,
                adj: sp.csr_matrix, training: bool = False) -> Tensor:
        """Class probability rows for every node."""
        cfg = self.cfg
        x = Tensor(features)
        x_emb = matmul(x, transpose(self.w_emb))
        if training:
            x_emb = dropout(x_emb, cfg.dropout, self._dropout_rng)
        h = matmul(x_emb, transpose(self.w_x))

        static_residual = None
        if cfg.residual in ("raw", "graph_raw"):
            static_residual = compute_residual(cfg.residual, x_emb, h, adj)

        for k, layer in enumerate(self.layers):
            x_res = (static_residual if static_residual is not None
                     else compute_residual(cfg.residual, x_emb, h, adj))
            z = diffuse(h, mask)
            h = gdu_mod.gdu(layer, x_res, z, h)
            if training:
                h = dropout(h, cfg.dropout, self._dropout_rng)
            if not np.isfinite(h.data).all():
                raise FloatingPointError(f"non-finite activations after layer {k}")
        return row_softmax(matmul(h, transpose(self.w_fc)))

    # -- checkpointing --------------------------------------------------------

    def state(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.parameters()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for name, p in self.parameters():
            if name not in state:
                raise ContractError(f"checkpoint is missing parameter {name!r}")
            arr = np.asarray(state[name], dtype=np.float64)
            if arr.shape != p.data.shape:
                raise ContractError(f"checkpoint parameter {name!r} has shape "
                                    f"{arr.shape}, expected {p.data.shape}")
            p.data = arr.copy()


CHECKPOINT_VERSION = 1


def save_checkpoint(path, state: dict[str, np.ndarray], meta: dict | None = None) -> None:
    """Write an ordered, versioned set of named matrices (bitwise round-trip)."""
    import json

    names = list(state)
    np.savez(path,
             __version__=np.array([CHECKPOINT_VERSION]),
             __names__=np.array(names),
             __meta__=np.array([json.dumps(meta or {})]),
             **{f"param/{n}": state[n] for n in names})


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    import json

    with np.load(path, allow_pickle=False) as npz:
        version = int(npz["__version__"][0])
        if version != CHECKPOINT_VERSION:
            raise ContractError(f"unsupported checkpoint version {version}")
        names = [str(n) for n in npz["__names__"]]
        state = {n: npz[f"param/{n}"] for n in names}
        meta = json.loads(str(npz["__meta__"][0]))
    return state, meta
