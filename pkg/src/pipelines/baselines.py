"""Non-private reference points.

B1 trains on the whole private graph and is tested on the public test nodes
(an upper bound on what any release can transfer). B2 trains on the public
graph with true labels for the public training nodes (what public data alone
achieves).
"""

import logging
import math
import time
from typing import Tuple

from schemas import BaselineConfig, ExperimentReport, ModelConfig, config_hash
from graphs import GraphDataset
from models import BaseClassifier, build_model, evaluate_accuracy, train
from .base_pipeline import Stream, derive_rng

logger = logging.getLogger(__name__)

BASELINES = ('b1', 'b2')


def baseline_b1(dataset: GraphDataset, model_config: ModelConfig, seed: int = 0) -> Tuple[float, BaseClassifier]:
    """Fully supervised on the private graph, inductive test on the public graph."""
    private = dataset.private
    model = build_model(model_config, private.feature_dim, dataset.num_classes, derive_rng(seed, Stream.BASELINE, 1, 0))
    train(model, private, private.all_nodes(), private.labels, model_config, derive_rng(seed, Stream.BASELINE, 1, 1))
    return evaluate_accuracy(model, dataset.public, dataset.split.test), model


def baseline_b2(dataset: GraphDataset, model_config: ModelConfig, seed: int = 0) -> Tuple[float, BaseClassifier]:
    """Transductive training on the public graph with its own training labels."""
    public = dataset.public
    train_nodes = dataset.split.train
    model = build_model(model_config, public.feature_dim, dataset.num_classes, derive_rng(seed, Stream.BASELINE, 2, 0))
    train(
        model, public, train_nodes, public.labels[train_nodes.ids], model_config,
        derive_rng(seed, Stream.BASELINE, 2, 1),
    )
    return evaluate_accuracy(model, public, dataset.split.test), model


def run_baseline(which: str, dataset: GraphDataset, config: BaselineConfig) -> ExperimentReport:
    """Run B1 or B2 and wrap the accuracy in a report with ε = ∞."""
    if which not in BASELINES:
        raise ValueError(f"unknown baseline '{which}', expected one of {BASELINES}")
    start = time.perf_counter()
    runner = baseline_b1 if which == 'b1' else baseline_b2
    accuracy, _ = runner(dataset, config.model, config.master_seed)
    logger.info(f"Baseline {which.upper()} on '{dataset.name}': accuracy={accuracy:.4f}")
    return ExperimentReport(
        method=which,
        dataset=dataset.name,
        config_hash=config_hash(config.model_dump(mode='json')),
        seed=config.master_seed,
        accuracy=accuracy,
        epsilon=math.inf,
        delta=0.0,
        num_queries=0,
        wall_time_s=time.perf_counter() - start,
    )
