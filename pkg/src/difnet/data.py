"""Citation-network loading, diffusion mask, normalized adjacency, splits.

Datasets arrive as the classic two-file plain-text layout:

* ``<name>.content`` — one node per line: ``<id> <0/1 features...> <label>``
* ``<name>.cites``   — one citation per line: ``<target-id> <source-id>``

Graphs are treated as undirected and unweighted; citations are symmetrized
on load.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Raised for malformed dataset files."""


class SplitError(ValueError):
    """Raised when a requested train/val/test split is infeasible."""


@dataclass(frozen=True)
class Graph:
    """An undirected attributed graph with one-hot node labels."""

    node_ids: tuple[str, ...]
    features: np.ndarray        # n x d_x, rows L1-normalized where nonzero
    labels: np.ndarray          # n x d_y one-hot
    edges: np.ndarray           # m x 2 unique undirected pairs, i < j
    edge_weights: np.ndarray    # m, all ones for unweighted datasets
    class_names: tuple[str, ...]

    @property
    def node_count(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class DiffusionMask:
    """Binary |V|x|V| attention support: edges (both directions) plus diagonal."""

    support: sp.csr_matrix  # bool csr, symmetric, full diagonal

    @property
    def node_count(self) -> int:
        return self.support.shape[0]

    def dense(self) -> np.ndarray:
        return self.support.toarray()


@dataclass(frozen=True)
class Split:
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray


def load_citation_dataset(content_path: str | os.PathLike,
                          cites_path: str | os.PathLike) -> Graph:
    """Load a ``.content``/``.cites`` pair into a :class:`Graph`.

    Feature rows are divided by their L1 norm (all-zero rows are left as
    zeros).  Label classes are numbered in first-appearance order.  Citation
    rows naming unknown ids are skipped with a logged count.
    """
    node_ids: list[str] = []
    feature_rows: list[np.ndarray] = []
    label_strings: list[str] = []
    feature_dim: int | None = None

    with open(content_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) < 3:
                raise ParseError(f"{content_path}:{lineno}: expected id, features, label; "
                                 f"got {len(fields)} fields")
            if feature_dim is None:
                feature_dim = len(fields) - 2
            elif len(fields) - 2 != feature_dim:
                raise ParseError(f"{content_path}:{lineno}: expected {feature_dim} features, "
                                 f"got {len(fields) - 2}")
            try:
                row = np.array(fields[1:-1], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"{content_path}:{lineno}: non-numeric feature: {exc}") from None
            node_ids.append(fields[0])
            feature_rows.append(row)
            label_strings.append(fields[-1])

    if not node_ids:
        raise ParseError(f"{content_path}: empty dataset")

    features = np.vstack(feature_rows)
    norms = np.abs(features).sum(axis=1, keepdims=True)
    np.divide(features, norms, out=features, where=norms != 0)

    class_names: list[str] = []
    class_index: dict[str, int] = {}
    for name in label_strings:
        if name not in class_index:
            class_index[name] = len(class_names)
            class_names.append(name)
    labels = np.zeros((len(node_ids), len(class_names)))
    labels[np.arange(len(node_ids)), [class_index[s] for s in label_strings]] = 1.0

    id_index = {nid: i for i, nid in enumerate(node_ids)}
    pairs: set[tuple[int, int]] = set()
    skipped = 0
    with open(cites_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ParseError(f"{cites_path}:{lineno}: expected two ids, got {len(fields)}")
            try:
                i, j = id_index[fields[0]], id_index[fields[1]]
            except KeyError:
                skipped += 1
                continue
            if i != j:
                pairs.add((min(i, j), max(i, j)))
    if skipped:
        logger.info("skipped %d citation rows referencing unknown ids", skipped)

    edges = (np.array(sorted(pairs), dtype=np.intp) if pairs
             else np.empty((0, 2), dtype=np.intp))
    return Graph(
        node_ids=tuple(node_ids),
        features=features,
        labels=labels,
        edges=edges,
        edge_weights=np.ones(len(edges)),
        class_names=tuple(class_names),
    )


def _symmetric_adjacency(g: Graph) -> sp.csr_matrix:
    n = g.node_count
    if len(g.edges) == 0:
        return sp.csr_matrix((n, n))
    i, j = g.edges[:, 0], g.edges[:, 1]
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def build_mask(g: Graph) -> DiffusionMask:
    """Attention support matrix: 1 iff connected in either direction or i == j."""
    support = (_symmetric_adjacency(g) + sp.identity(g.node_count, format="csr")) > 0
    return DiffusionMask(support=support.tocsr())


def neighbor_set(g: Graph, i: int) -> set[int]:
    """Indices adjacent to node ``i`` (self excluded; graphs carry no self-loops)."""
    if not 0 <= i < g.node_count:
        raise IndexError(f"node index {i} out of range for {g.node_count} nodes")
    out: set[int] = set()
    for a, b in g.edges:
        if a == i:
            out.add(int(b))
        elif b == i:
            out.add(int(a))
    return out


def normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """Symmetrically degree-normalized adjacency with self-loops.

    D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.  Isolated
    nodes end up with a single unit self-loop entry.
    """
    a_tilde = _symmetric_adjacency(g) + sp.identity(g.node_count, format="csr")
    inv_sqrt_deg = 1.0 / np.sqrt(np.asarray(a_tilde.sum(axis=1)).ravel())
    d = sp.diags(inv_sqrt_deg)
    return (d @ a_tilde @ d).tocsr()


def standard_split(g: Graph, per_class_train: int = 20,
                   val_size: int = 500, test_size: int = 1000) -> Split:
    """Deterministic benchmark split.

    Training: the first ``per_class_train`` nodes of each class in node
    order.  Validation: the next ``val_size`` non-training nodes in node
    order.  Test: the final ``test_size`` nodes of the dataset.
    """
    n = g.node_count
    if per_class_train < 1:
        raise SplitError("per_class_train must be at least 1")
    class_ids = g.labels.argmax(axis=1)
    train: list[int] = []
    for c in range(g.num_classes):
        members = np.flatnonzero(class_ids == c)
        if len(members) < per_class_train:
            raise SplitError(f"class {c} has only {len(members)} nodes, "
                             f"need {per_class_train}")
        train.extend(members[:per_class_train].tolist())
    train_idx = np.array(sorted(train), dtype=np.intp)

    in_train = np.zeros(n, dtype=bool)
    in_train[train_idx] = True
    remaining = np.flatnonzero(~in_train)
    if len(remaining) < val_size:
        raise SplitError(f"not enough nodes for {val_size} validation nodes")
    val_idx = remaining[:val_size]

    if test_size < 1 or test_size > n:
        raise SplitError(f"test_size {test_size} infeasible for {n} nodes")
    test_idx = np.arange(n - test_size, n, dtype=np.intp)
    if in_train[test_idx].any() or np.intersect1d(val_idx, test_idx).size:
        raise SplitError("test region overlaps train/validation; dataset too small "
                         "for the requested sizes")
    return Split(train_idx=train_idx, val_idx=val_idx, test_idx=test_idx)
