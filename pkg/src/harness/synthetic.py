"""Desk-scale stochastic block model datasets."""

import logging
from typing import Optional

import networkx as nx
import numpy as np

from schemas import SbmSpec
from graphs import Graph, GraphDataset, GraphRole, NodeSet, PublicSplit

logger = logging.getLogger(__name__)


def _class_means(spec: SbmSpec) -> np.ndarray:
    means = np.zeros((spec.num_classes, spec.feature_dim))
    means[np.arange(spec.num_classes), np.arange(spec.num_classes)] = spec.class_mean_separation
    return means


def generate_sbm(spec: SbmSpec, rng: np.random.Generator, name: Optional[str] = None) -> GraphDataset:
    """Draw one SBM and split its nodes into a private and a public graph.

    Features are the block's one-hot mean scaled by the separation plus
    isotropic Gaussian noise. Edges between the two parts are discarded.
    """
    sizes = [spec.nodes_per_class] * spec.num_classes
    probs = np.full((spec.num_classes, spec.num_classes), spec.inter_p)
    np.fill_diagonal(probs, spec.intra_p)
    sbm = nx.stochastic_block_model(sizes, probs.tolist(), seed=int(rng.integers(2**31 - 1)))
    n = sbm.number_of_nodes()
    labels = np.array([sbm.nodes[v]['block'] for v in range(n)], dtype=np.int64)
    features = _class_means(spec)[labels] + spec.feature_noise_sigma * rng.standard_normal((n, spec.feature_dim))
    edges = np.array(list(sbm.edges()), dtype=np.int64).reshape(-1, 2)

    order = rng.permutation(n)
    n_private = int(round(spec.private_fraction * n))
    n_train = int(round(spec.public_train_fraction * n))
    private_ids = np.sort(order[:n_private])
    public_ids = np.sort(order[n_private:])
    train_ids = order[n_private:n_private + n_train]
    if private_ids.size == 0 or train_ids.size == 0 or public_ids.size == train_ids.size:
        raise ValueError("SBM split leaves the private graph, public train or public test set empty")

    missing = set(range(spec.num_classes)) - set(labels[private_ids].tolist())
    if missing:
        raise ValueError(f"private graph has no nodes of classes {sorted(missing)}")

    name = name or spec.name
    private = _part(private_ids, edges, features, labels, spec.num_classes, GraphRole.PRIVATE, f"{name}/private")
    public = _part(public_ids, edges, features, labels, spec.num_classes, GraphRole.PUBLIC, f"{name}/public")
    local_train = np.searchsorted(public_ids, train_ids)
    is_train = np.zeros(public_ids.size, dtype=bool)
    is_train[local_train] = True
    split = PublicSplit(train=NodeSet.of(local_train), test=NodeSet.of(np.flatnonzero(~is_train)))
    logger.info(
        f"Generated SBM '{name}': {spec.num_classes} classes, private {private.num_nodes} nodes/"
        f"{private.num_edges} edges, public {public.num_nodes} nodes/{public.num_edges} edges"
    )
    return GraphDataset(private=private, public=public, split=split, name=name)


def _part(ids, edges, features, labels, num_classes, role, name) -> Graph:
    local = np.full(labels.size, -1, dtype=np.int64)
    local[ids] = np.arange(ids.size)
    keep = (local[edges[:, 0]] >= 0) & (local[edges[:, 1]] >= 0)
    return Graph.from_edges(
        ids.size, local[edges[keep]], features[ids], labels[ids],
        num_classes=num_classes, role=role, name=name, parent_ids=ids,
    )


def as_networkx(graph: Graph) -> nx.Graph:
    """networkx view of a graph's structure (nodes 0..n−1)."""
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_nodes))
    coo = graph.adjacency.tocoo()
    g.add_edges_from((int(u), int(v)) for u, v in zip(coo.row, coo.col) if u < v)
    return g
