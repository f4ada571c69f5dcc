"""Building, training and querying node classifiers."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import torch
import torch.nn.functional as F

from schemas import ModelConfig, ModelKind
from graphs import Graph, NodeSet, induced_subgraph, l_hop_neighborhood
from .base_model import BaseClassifier, torch_generator
from .mlp_model import MlpClassifier
from .sage_model import GraphSageClassifier

logger = logging.getLogger(__name__)


class TrainingDivergenceError(RuntimeError):
    """Loss or parameters became non-finite."""

    def __init__(self, epoch: int, query_id: Optional[int] = None, detail: str = "non-finite loss"):
        where = f" (query {query_id})" if query_id is not None else ""
        super().__init__(f"training diverged at epoch {epoch}{where}: {detail}")
        self.epoch = epoch
        self.query_id = query_id


@dataclass
class TrainingLog:
    losses: List[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else float('nan')


def build_model(config: ModelConfig, input_dim: int, num_classes: int, rng: np.random.Generator) -> BaseClassifier:
    """Instantiate the classifier family named by ``config.kind``."""
    if config.kind == ModelKind.MLP:
        return MlpClassifier(config, input_dim, num_classes, rng)
    return GraphSageClassifier(config, input_dim, num_classes, rng)


def graph_tensors(model: BaseClassifier, graph: Graph):
    """Features and (for GNNs) the sparse row-normalised adjacency as float64 tensors."""
    features = torch.tensor(graph.features, dtype=torch.float64)
    if not model.requires_structure:
        return features, None
    coo = graph.mean_adjacency().tocoo()
    indices = torch.as_tensor(np.vstack([coo.row, coo.col]), dtype=torch.long)
    mean_adj = torch.sparse_coo_tensor(
        indices, torch.as_tensor(coo.data, dtype=torch.float64), (graph.num_nodes, graph.num_nodes)
    ).coalesce()
    return features, mean_adj


def train(
    model: BaseClassifier,
    graph: Graph,
    train_nodes: NodeSet,
    labels: np.ndarray,
    config: Optional[ModelConfig] = None,
    rng: Optional[np.random.Generator] = None,
    query_id: Optional[int] = None,
) -> TrainingLog:
    """Full-batch Adam on the NLL of ``labels`` (aligned with ``train_nodes``).

    Deterministic given the model's initial parameters and ``rng``.
    """
    config = config or model.config
    nodes = train_nodes.ids
    labels = np.asarray(labels, dtype=np.int64)
    if nodes.size == 0:
        raise ValueError("cannot train on an empty node set")
    if labels.shape != nodes.shape:
        raise ValueError(f"{labels.size} labels for {nodes.size} training nodes")
    if labels.min() < 0 or labels.max() >= model.num_classes:
        raise ValueError(f"training labels must lie in [0, {model.num_classes})")
    generator = torch_generator(rng if rng is not None else np.random.default_rng(0))

    features, mean_adj = graph_tensors(model, graph)
    index = torch.as_tensor(nodes, dtype=torch.long)
    target = torch.as_tensor(labels, dtype=torch.long)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay)
    log = TrainingLog()
    model.train()
    for epoch in range(config.epochs):
        optimizer.zero_grad()
        log_probs = model(features, mean_adj, generator)
        loss = F.nll_loss(log_probs[index], target)
        if not torch.isfinite(loss):
            raise TrainingDivergenceError(epoch, query_id)
        loss.backward()
        optimizer.step()
        if not model.all_finite():
            raise TrainingDivergenceError(epoch, query_id, "non-finite parameters")
        log.losses.append(loss.item())
        if epoch % 50 == 0 or epoch == config.epochs - 1:
            logger.debug(f"epoch {epoch}: loss {loss.item():.4f}")
    model.eval()
    return log


def forward(
    model: BaseClassifier,
    graph: Graph,
    nodes: Optional[NodeSet] = None,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Posterior rows for ``nodes`` (all nodes by default) in the model's current mode."""
    features, mean_adj = graph_tensors(model, graph)
    generator = torch_generator(rng) if rng is not None else None
    with torch.no_grad():
        probs = model(features, mean_adj, generator).exp().numpy()
    return probs if nodes is None else probs[nodes.ids]


def predict_proba(model: BaseClassifier, graph: Graph, nodes: Optional[NodeSet] = None) -> np.ndarray:
    """Eval-mode posteriors; restores the previous mode afterwards."""
    was_training = model.training
    model.eval()
    try:
        return forward(model, graph, nodes)
    finally:
        model.train(was_training)


def predict_posterior(model: BaseClassifier, graph: Graph, node: int, hops: Optional[int] = None) -> np.ndarray:
    """Posterior of one node computed from its ``hops``-hop neighbourhood only.

    ``hops`` defaults to the model's receptive field (its layer count, or 0
    for an MLP).
    """
    if hops is None:
        hops = model.num_layers if model.requires_structure else 0
    if model.requires_structure and hops < model.num_layers:
        raise ValueError(f"{model.num_layers}-layer GNN needs a {model.num_layers}-hop neighbourhood, got {hops}")
    nodes = l_hop_neighborhood(graph, node, hops)
    sub = induced_subgraph(graph, nodes)
    local = int(np.searchsorted(nodes.ids, node))
    return predict_proba(model, sub)[local]


def evaluate_accuracy(model: BaseClassifier, graph: Graph, nodes: NodeSet, labels: Optional[np.ndarray] = None) -> float:
    """Share of ``nodes`` whose argmax posterior matches the label."""
    if len(nodes) == 0:
        raise ValueError("cannot evaluate on an empty node set")
    truth = graph.labels[nodes.ids] if labels is None else np.asarray(labels)
    predicted = predict_proba(model, graph, nodes).argmax(axis=1)
    return float((predicted == truth).mean())
