"""Minimal bias-free GCN baseline.

Layer rule: H <- ReLU(A_hat @ H @ W_k^T), with row softmax instead of ReLU
on the final layer and dropout on each layer's input during training.  Used
as the depth-degradation reference point for the diffusive model.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .gdu import glorot
from .model import dropout, seeded_streams
from .tensor import Tensor, const_matmul, matmul, relu, row_softmax, transpose


class Gcn:
    def __init__(self, feature_dim: int, num_classes: int, depth: int,
                 hidden: int = 16, dropout_rate: float = 0.5, seed: int = 42):
        if depth < 2:
            raise ValueError("GCN needs depth >= 2 (input and output layers)")
        self.depth = depth
        self.dropout_rate = dropout_rate
        init_rng, self._dropout_rng = seeded_streams(seed, 2)
        dims = [feature_dim] + [hidden] * (depth - 1) + [num_classes]
        self.weights = [glorot(init_rng, dims[k + 1], dims[k]) for k in range(depth)]

    def parameters(self) -> list[tuple[str, Tensor]]:
        return [(f"w{k}", w) for k, w in enumerate(self.weights)]

    def forward(self, features: np.ndarray, adj: sp.csr_matrix,
                training: bool = False) -> Tensor:
        h = Tensor(features)
        for k, w in enumerate(self.weights):
            if training:
                h = dropout(h, self.dropout_rate, self._dropout_rng)
            h = matmul(const_matmul(adj, h), transpose(w))
            h = relu(h) if k < self.depth - 1 else row_softmax(h)
        return h

    def state(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.parameters()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        from .tensor import ContractError

        for name, p in self.parameters():
            if name not in state:
                raise ContractError(f"checkpoint is missing parameter {name!r}")
            arr = np.asarray(state[name], dtype=np.float64)
            if arr.shape != p.data.shape:
                raise ContractError(f"checkpoint parameter {name!r} has shape "
                                    f"{arr.shape}, expected {p.data.shape}")
            p.data = arr.copy()
