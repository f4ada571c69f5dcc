"""PATE comparison runs: disjoint teachers, noisy vote counts.

The private nodes are split into ``n_teachers`` equal parts. PATE-G trains a
GNN teacher on each part's induced subgraph; PATE-M trains an MLP on the
part's feature rows. Each query releases the noisy argmax of the teachers'
vote counts.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional

import numpy as np

from schemas import ExperimentReport, ModelKind, PateConfig, QueryOutcome, config_hash
from graphs import AccessTracker, Graph, GraphDataset, NodeSet, induced_subgraph
from models import BaseClassifier, build_model, predict_proba, train
from accounting import pate_budget
from .base_pipeline import PipelineResult, ReleasePipeline, Stream, derive_rng
from .labeling import noisy_vote_label

logger = logging.getLogger(__name__)

MIN_PARTITION_SIZE = 2


class PatePipeline(ReleasePipeline):
    """Noisy-vote aggregation over teachers trained on disjoint partitions."""

    def __init__(self, config: PateConfig):
        super().__init__(config)
        self.method = config.method

    def partition(self, private: Graph) -> List[NodeSet]:
        """Random near-equal split of the private nodes."""
        config: PateConfig = self.config
        rng = derive_rng(config.master_seed, Stream.PARTITION)
        shuffled = rng.permutation(private.num_nodes)
        parts = [NodeSet.of(chunk) for chunk in np.array_split(shuffled, config.n_teachers)]
        smallest = min(len(p) for p in parts)
        if smallest < MIN_PARTITION_SIZE:
            raise ValueError(
                f"{config.n_teachers} teachers leave partitions of {smallest} nodes from {private.num_nodes} private nodes"
            )
        return parts

    def run(self, dataset: GraphDataset) -> PipelineResult:
        config: PateConfig = self.config
        params = config.privacy
        start = time.perf_counter()

        tracker = AccessTracker()
        private = dataset.private.with_tracker(tracker)
        dataset = replace(dataset, private=private)
        params.check_delta(private.num_nodes)
        queries = self.select_queries(dataset, params.num_queries, config.master_seed)

        with tracker.phase("partition"):
            parts = self.partition(private)
            subgraphs = [induced_subgraph(private, part, name=f"partition:{t}") for t, part in enumerate(parts)]
        logger.info(
            f"{self.method} on '{dataset.name}': {config.n_teachers} teachers of ~{len(parts[0])} nodes, "
            f"|Q|={queries.size}, lambda={params.lambda_}"
        )

        with tracker.phase("teachers"):
            with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
                teachers = list(pool.map(
                    lambda t: self._train_teacher(t, subgraphs[t], dataset.num_classes), range(len(subgraphs))
                ))

        query_nodes = NodeSet.of(queries)
        votes = np.zeros((queries.size, dataset.num_classes), dtype=np.int64)
        position = np.searchsorted(query_nodes.ids, queries)
        for teacher in teachers:
            predicted = predict_proba(teacher, dataset.public, query_nodes).argmax(axis=1)[position]
            votes[np.arange(queries.size), predicted] += 1

        outcomes = []
        for i, node in enumerate(queries):
            label = noisy_vote_label(votes[i], params.beta, derive_rng(config.master_seed, Stream.QUERY_JOB, i))
            outcomes.append(QueryOutcome(
                query_index=i,
                query_node=int(node),
                posterior=votes[i] / len(teachers),
                pseudo_label=label,
                teacher_subgraph_size=len(parts[0]),
            ))
        labels = np.array([o.pseudo_label for o in outcomes], dtype=np.int64)

        student = self.train_student(dataset, queries, labels, config.student, config.master_seed, tracker)
        accuracy = self.evaluate(student, dataset)
        guarantee = pate_budget(params.lambda_, int(queries.size), params.delta, config.max_order)

        report = ExperimentReport(
            method=self.method,
            dataset=dataset.name,
            config_hash=config_hash(config.model_dump(mode='json', by_alias=True)),
            seed=config.master_seed,
            accuracy=accuracy,
            epsilon=guarantee.epsilon,
            delta=params.delta,
            num_queries=int(queries.size),
            optimal_alpha=guarantee.optimal_order,
            wall_time_s=self._elapsed(start),
            params={
                'lambda': params.lambda_,
                'n_teachers': config.n_teachers,
                'teacher_kind': config.teacher_kind.value,
            },
            metadata={'label_agreement': self.label_agreement(dataset, queries, labels)},
        )
        logger.info(f"{self.method} done: accuracy={accuracy:.4f}, eps={guarantee.epsilon:.4f}")
        return PipelineResult(
            student=student, outcomes=outcomes, report=report, tracker=tracker, extras={'votes': votes},
        )

    def _train_teacher(self, index: int, graph: Graph, num_classes: int) -> BaseClassifier:
        config: PateConfig = self.config
        teacher = build_model(
            config.teacher, graph.feature_dim, num_classes, derive_rng(config.master_seed, Stream.TEACHER, index, 0)
        )
        train(
            teacher, graph, graph.all_nodes(), graph.labels, config.teacher,
            derive_rng(config.master_seed, Stream.TEACHER, index, 1), query_id=None,
        )
        return teacher


def pate_run(
    config: PateConfig,
    dataset: GraphDataset,
    n_teachers: Optional[int] = None,
    teacher_kind: Optional[ModelKind] = None,
):
    """Run PATE-G or PATE-M, optionally overriding the teacher count and kind."""
    update = {}
    if n_teachers is not None:
        update['n_teachers'] = n_teachers
    if teacher_kind is not None:
        update['teacher_kind'] = ModelKind(teacher_kind)
    if update:
        config = PateConfig(**{**config.model_dump(by_alias=True), **update})
    result = PatePipeline(config).run(dataset)
    return result.student, result.report
