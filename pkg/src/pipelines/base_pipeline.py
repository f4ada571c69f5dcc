"""Shared machinery for knowledge-transfer release pipelines.

A pipeline answers private queries on public nodes, then trains a student
on the public graph from the released labels alone.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, List

import numpy as np

from schemas import ExperimentReport, ModelConfig, QueryOutcome
from graphs import ANY_GRAPH, AccessTracker, GraphDataset, NodeSet
from models import BaseClassifier, build_model, evaluate_accuracy, train

logger = logging.getLogger(__name__)


class Stream(IntEnum):
    """Independent random streams derived from one master seed."""
    QUERY_SELECTION = 0
    POISSON = 1
    QUERY_JOB = 2
    STUDENT = 3
    PARTITION = 4
    TEACHER = 5
    BASELINE = 6


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by ``key`` under ``master_seed``."""
    if master_seed < 0:
        raise ValueError(f"master seed must be non-negative, got {master_seed}")
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key)))


@dataclass
class PipelineResult:
    """Student model plus everything needed to report the run."""
    student: BaseClassifier
    outcomes: List[QueryOutcome]
    report: ExperimentReport
    tracker: AccessTracker
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def pseudo_labels(self) -> np.ndarray:
        return np.array([o.pseudo_label for o in self.outcomes], dtype=np.int64)


class ReleasePipeline(ABC):
    """Abstract base for PrivGNN and PATE style runs."""

    method = "release"

    def __init__(self, config):
        self.config = config

    @abstractmethod
    def run(self, dataset: GraphDataset) -> PipelineResult:
        """Answer the queries, train the student and account the budget."""
        pass

    def select_queries(self, dataset: GraphDataset, count: int, master_seed: int) -> np.ndarray:
        """Draw ``count`` distinct public training nodes, in draw order."""
        pool = dataset.split.train.ids
        if count > pool.size:
            raise ValueError(f"{count} queries requested but only {pool.size} public training nodes exist")
        if count < 1:
            raise ValueError("at least one query is needed to train a student")
        rng = derive_rng(master_seed, Stream.QUERY_SELECTION)
        return rng.choice(pool, size=count, replace=False)

    def train_student(
        self,
        dataset: GraphDataset,
        queries: np.ndarray,
        labels: np.ndarray,
        config: ModelConfig,
        master_seed: int,
        tracker: AccessTracker,
    ) -> BaseClassifier:
        """Fit the student on public structure and released labels; private reads raise."""
        public = dataset.public
        order = np.argsort(queries)
        with tracker.phase("student", forbid=frozenset({ANY_GRAPH})):
            logger.info(f"Training student on {queries.size} released labels")
            init_rng = derive_rng(master_seed, Stream.STUDENT, 0)
            student = build_model(config, public.feature_dim, dataset.num_classes, init_rng)
            train(
                student, public, NodeSet.of(queries[order]), labels[order], config,
                derive_rng(master_seed, Stream.STUDENT, 1),
            )
        return student

    def evaluate(self, student: BaseClassifier, dataset: GraphDataset) -> float:
        return evaluate_accuracy(student, dataset.public, dataset.split.test)

    @staticmethod
    def label_agreement(dataset: GraphDataset, queries: np.ndarray, labels: np.ndarray) -> float:
        """Share of released labels that match the public ground truth."""
        return float((dataset.public.labels[queries] == labels).mean())

    @staticmethod
    def _elapsed(start: float) -> float:
        return time.perf_counter() - start
