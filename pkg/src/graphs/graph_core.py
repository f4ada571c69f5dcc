"""Immutable attributed graphs and the node-set operations the release runs on.

Adjacency is stored as a symmetric CSR matrix with sorted column indices, so
per-node neighbour lists come out sorted. Graphs given a tracker record every
read of their features, labels or structure.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional

import numpy as np
import scipy.sparse as sp
from sklearn.metrics import pairwise_distances

from schemas import KnnMetric
from .access import AccessTracker

logger = logging.getLogger(__name__)


class GraphRole(Enum):
    PRIVATE = "private"
    PUBLIC = "public"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Sorted, duplicate-free node ids of one graph."""
    ids: np.ndarray

    @classmethod
    def of(cls, ids: Iterable[int], num_nodes: Optional[int] = None) -> "NodeSet":
        arr = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64))
        if arr.size and arr[0] < 0:
            raise ValueError(f"node ids must be non-negative, got {arr[0]}")
        if num_nodes is not None and arr.size and arr[-1] >= num_nodes:
            raise ValueError(f"node id {arr[-1]} out of range for graph with {num_nodes} nodes")
        return cls(_frozen(arr))

    @classmethod
    def empty(cls) -> "NodeSet":
        return cls.of([])

    def union(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(_frozen(np.union1d(self.ids, other.ids)))

    def __len__(self) -> int:
        return int(self.ids.size)

    def __iter__(self) -> Iterator[int]:
        return (int(i) for i in self.ids)

    def __contains__(self, node: int) -> bool:
        pos = np.searchsorted(self.ids, node)
        return bool(pos < self.ids.size and self.ids[pos] == node)

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeSet) and np.array_equal(self.ids, other.ids)

    def __repr__(self) -> str:
        return f"NodeSet({self.ids.tolist()})"

    def tolist(self):
        return self.ids.tolist()


class Graph:
    """Undirected attributed graph; never mutated after construction."""

    def __init__(
        self,
        adjacency: sp.csr_matrix,
        features: np.ndarray,
        labels: Optional[np.ndarray] = None,
        num_classes: Optional[int] = None,
        role: GraphRole = GraphRole.PUBLIC,
        name: str = "graph",
        parent_ids: Optional[np.ndarray] = None,
        tracker: Optional[AccessTracker] = None,
    ):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise ValueError(f"features must be a 2-D matrix, got shape {features.shape}")
        n = features.shape[0]
        adjacency = sp.csr_matrix(adjacency, dtype=np.float64, copy=True)
        if adjacency.shape != (n, n):
            raise ValueError(f"adjacency shape {adjacency.shape} does not match {n} nodes")
        if adjacency.diagonal().any():
            raise ValueError("graph must not contain self-loops")
        if (adjacency != adjacency.T).nnz:
            raise ValueError("adjacency must be symmetric")
        adjacency.sort_indices()

        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
            if n and labels.min() < 0:
                raise ValueError("labels must be non-negative class ids")
            inferred = int(labels.max()) + 1 if n else 0
            if num_classes is None:
                num_classes = inferred
            elif inferred > num_classes:
                raise ValueError(f"label {inferred - 1} is out of range for {num_classes} classes")
            labels = _frozen(labels.copy())

        self._adjacency = adjacency
        self._features = _frozen(features.copy())
        self._labels = labels
        self.num_classes = num_classes
        self.role = role
        self.name = name
        self.parent_ids = None if parent_ids is None else _frozen(np.asarray(parent_ids, dtype=np.int64).copy())
        self._tracker = tracker
        self._mean_adjacency: Optional[sp.csr_matrix] = None

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: Iterable,
        features: np.ndarray,
        labels: Optional[np.ndarray] = None,
        **kwargs,
    ) -> "Graph":
        """Build from an edge list: drops self-loops and duplicates, symmetrises."""
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= num_nodes):
            raise ValueError(f"edge endpoint out of range for {num_nodes} nodes")
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adjacency = sp.coo_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(num_nodes, num_nodes)
        ).tocsr()
        adjacency.data[:] = 1.0
        return cls(adjacency, features, labels, **kwargs)

    def with_tracker(self, tracker: Optional[AccessTracker], name: Optional[str] = None) -> "Graph":
        """Same data, different tracker (arrays are shared)."""
        clone = object.__new__(Graph)
        clone.__dict__.update(self.__dict__)
        clone._tracker = tracker
        if name is not None:
            clone.name = name
        return clone

    def _record(self, kind: str) -> None:
        if self._tracker is not None:
            self._tracker.record(self.name, kind)

    @property
    def num_nodes(self) -> int:
        return int(self._features.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self._features.shape[1])

    @property
    def num_edges(self) -> int:
        """Undirected edge count."""
        return int(self._adjacency.nnz // 2)

    @property
    def has_labels(self) -> bool:
        return self._labels is not None

    @property
    def features(self) -> np.ndarray:
        self._record("features")
        return self._features

    @property
    def labels(self) -> np.ndarray:
        self._record("labels")
        if self._labels is None:
            raise ValueError(f"graph '{self.name}' has no labels")
        return self._labels

    @property
    def adjacency(self) -> sp.csr_matrix:
        self._record("structure")
        return self._adjacency

    def neighbors(self, node: int) -> np.ndarray:
        """Sorted neighbour ids of one node."""
        self._record("structure")
        adj = self._adjacency
        return adj.indices[adj.indptr[node]:adj.indptr[node + 1]]

    def degrees(self) -> np.ndarray:
        self._record("structure")
        return np.diff(self._adjacency.indptr)

    def mean_adjacency(self) -> sp.csr_matrix:
        """Row-normalised adjacency; isolated nodes get an all-zero row."""
        self._record("structure")
        if self._mean_adjacency is None:
            deg = np.diff(self._adjacency.indptr).astype(np.float64)
            inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
            self._mean_adjacency = sp.diags(inv) @ self._adjacency
            self._mean_adjacency = sp.csr_matrix(self._mean_adjacency)
        return self._mean_adjacency

    def all_nodes(self) -> NodeSet:
        return NodeSet(_frozen(np.arange(self.num_nodes, dtype=np.int64)))

    def __repr__(self) -> str:
        return (
            f"Graph(name={self.name!r}, role={self.role.value}, nodes={self.num_nodes}, "
            f"edges={self.num_edges}, classes={self.num_classes})"
        )


def poisson_sample(graph: Graph, gamma: float, rng: np.random.Generator) -> NodeSet:
    """Keep each node independently with probability γ."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"sampling ratio must be in [0, 1], got {gamma}")
    keep = rng.random(graph.num_nodes) < gamma
    return NodeSet(_frozen(np.flatnonzero(keep).astype(np.int64)))


def knn_select(
    query_feature: np.ndarray,
    candidates: NodeSet,
    graph: Graph,
    k: int,
    metric: KnnMetric = KnnMetric.EUCLIDEAN,
) -> NodeSet:
    """The k candidates nearest to the query feature; ties go to the smaller id."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if len(candidates) == 0:
        raise ValueError("cannot select neighbours from an empty candidate set")
    if len(candidates) < k:
        logger.warning(f"Only {len(candidates)} candidates for k={k}; returning all of them")
    query = np.asarray(query_feature, dtype=np.float64).reshape(1, -1)
    distances = pairwise_distances(query, graph.features[candidates.ids], metric=KnnMetric(metric).value)[0]
    order = np.lexsort((candidates.ids, distances))
    return NodeSet.of(candidates.ids[order[:k]])


def induced_subgraph(graph: Graph, nodes: NodeSet, name: Optional[str] = None) -> Graph:
    """Subgraph on the given nodes, renumbered 0..|nodes|−1 in id order.

    ``parent_ids`` maps local ids back to the parent graph. The result carries
    no tracker.
    """
    ids = nodes.ids
    if ids.size and ids[-1] >= graph.num_nodes:
        raise ValueError(f"node id {ids[-1]} out of range for graph with {graph.num_nodes} nodes")
    sub_adj = graph.adjacency[ids][:, ids]
    labels = graph.labels[ids] if graph.has_labels else None
    return Graph(
        sub_adj,
        graph.features[ids],
        labels,
        num_classes=graph.num_classes,
        role=graph.role,
        name=name or f"{graph.name}[{ids.size}]",
        parent_ids=ids if graph.parent_ids is None else graph.parent_ids[ids],
    )


def l_hop_neighborhood(graph: Graph, node: int, hops: int) -> NodeSet:
    """Every node within ``hops`` edges of ``node``, the node itself included."""
    if hops < 0:
        raise ValueError(f"hop count must be non-negative, got {hops}")
    if not 0 <= node < graph.num_nodes:
        raise ValueError(f"node {node} out of range for graph with {graph.num_nodes} nodes")
    adj = graph.adjacency
    reached = np.zeros(graph.num_nodes, dtype=bool)
    reached[node] = True
    frontier = np.array([node], dtype=np.int64)
    for _ in range(hops):
        if frontier.size == 0:
            break
        nbrs = np.unique(adj[frontier].indices)
        frontier = nbrs[~reached[nbrs]]
        reached[frontier] = True
    return NodeSet(_frozen(np.flatnonzero(reached).astype(np.int64)))
