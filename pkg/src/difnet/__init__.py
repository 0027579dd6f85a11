"""Gated diffusive graph neural network with a self-contained autodiff core.

Public surface:

* :mod:`difnet.tensor`    — 2-D reverse-mode autodiff substrate
* :mod:`difnet.data`      — citation-network loading, mask, adjacency, splits
* :mod:`difnet.diffusion` — masked attention neighborhood diffusion
* :mod:`difnet.gdu`       — gated diffusive unit (full and simplified)
* :mod:`difnet.model`     — the full DifNet pipeline
* :mod:`difnet.gcn`       — bias-free GCN baseline
* :mod:`difnet.training`  — Adam loop, evaluation, depth sweeps
* :mod:`difnet.cli`       — command-line harness
"""

from .data import (DiffusionMask, Graph, Split, build_mask,
                   load_citation_dataset, neighbor_set, normalized_adjacency,
                   standard_split)
from .diffusion import diffuse, influence_weights
from .gcn import Gcn
from .gdu import GduParamsFull, GduParamsSimplified, gate_values, gdu, gdu_full, gdu_simplified
from .model import (DifNet, ModelConfig, compute_residual, load_checkpoint,
                    loss, predict, save_checkpoint)
from .synthetic import random_graph, toy_graph, two_cluster_graph
from .tensor import Tensor, grad_check
from .training import Adam, TrainConfig, TrainReport, depth_sweep, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "Adam", "DifNet", "DiffusionMask", "Gcn", "GduParamsFull",
    "GduParamsSimplified", "Graph", "ModelConfig", "Split", "Tensor",
    "TrainConfig", "TrainReport", "build_mask", "compute_residual",
    "depth_sweep", "diffuse", "evaluate", "gate_values", "gdu", "gdu_full",
    "gdu_simplified", "grad_check", "influence_weights",
    "load_checkpoint", "load_citation_dataset", "loss", "neighbor_set",
    "normalized_adjacency", "predict", "random_graph", "save_checkpoint",
    "standard_split", "toy_graph", "train", "two_cluster_graph",
]
