"""Private release by per-query teachers on subsampled nearest neighbours.

For every query node v on the public graph:

1. Poisson-sample the private nodes with ratio γ (fresh sample per query
   unless ``resample_per_query`` is off).
2. Keep the K sampled nodes closest to v in feature space and train a
   teacher GNN on their induced private subgraph. An empty sample gets no
   teacher and a uniform posterior instead.
3. Run the teacher on v's neighbourhood in the public graph and release
   the argmax of its posterior plus Laplace(0, 1/λ) noise.

A student is then trained on the public graph from the released labels.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional

import numpy as np

from schemas import ExperimentReport, PrivGnnConfig, QueryOutcome, config_hash
from graphs import (
    AccessTracker, Graph, GraphDataset, GraphRole, NodeSet, induced_subgraph, knn_select, poisson_sample,
)
from models import TrainingDivergenceError, build_model, predict_posterior, train
from accounting import privgnn_budget, pure_dp_epsilon
from .base_pipeline import PipelineResult, ReleasePipeline, Stream, derive_rng
from .labeling import noisy_pseudo_label

logger = logging.getLogger(__name__)

SAMPLE, TEACHER_INIT, TEACHER_TRAIN, NOISE = range(4)


class PrivGnnPipeline(ReleasePipeline):
    """Runs one PrivGNN release for a fixed config and master seed."""

    method = "privgnn"

    def __init__(self, config: PrivGnnConfig):
        super().__init__(config)
        self._shared_sample: Optional[NodeSet] = None

    def run(self, dataset: GraphDataset) -> PipelineResult:
        config: PrivGnnConfig = self.config
        params = config.privacy
        start = time.perf_counter()
        if dataset.private.role != GraphRole.PRIVATE or not dataset.private.has_labels:
            raise ValueError("private graph must be labelled and marked private")

        tracker = AccessTracker()
        private = dataset.private.with_tracker(tracker)
        dataset = replace(dataset, private=private)
        params.check_delta(private.num_nodes)

        queries = self.select_queries(dataset, config.query_count, config.master_seed)
        logger.info(
            f"PrivGNN on '{dataset.name}': |Q|={queries.size}, gamma={params.gamma}, "
            f"lambda={params.lambda_}, K={config.k_neighbors}, workers={config.max_workers}"
        )

        self._shared_sample = None
        if not config.resample_per_query:
            logger.warning(
                "Reusing one Poisson sample for all queries; the subsampled accounting assumes a fresh sample per query"
            )
            with tracker.phase("selection"):
                self._shared_sample = poisson_sample(private, params.gamma, derive_rng(config.master_seed, Stream.POISSON))

        outcomes = self._answer_queries(queries, dataset, tracker)
        labels = np.array([o.pseudo_label for o in outcomes], dtype=np.int64)

        student = self.train_student(dataset, queries, labels, config.student, config.master_seed, tracker)
        accuracy = self.evaluate(student, dataset)

        tight, crude = privgnn_budget(params, config.max_order, config.conversion)
        alternative, _ = privgnn_budget(params, config.max_order, config.conversion.other)

        report = ExperimentReport(
            method=self.method,
            dataset=dataset.name,
            config_hash=config_hash(config.model_dump(mode='json', by_alias=True)),
            seed=config.master_seed,
            accuracy=accuracy,
            epsilon=tight.epsilon,
            delta=params.delta,
            num_queries=int(queries.size),
            optimal_alpha=tight.optimal_order,
            crude_epsilon=crude,
            wall_time_s=self._elapsed(start),
            params={
                'gamma': params.gamma,
                'lambda': params.lambda_,
                'k_neighbors': config.k_neighbors,
                'conversion': config.conversion.value,
                'noise_free': config.noise_free,
                'alternative_epsilon': alternative.epsilon,
                'alternative_alpha': alternative.optimal_order,
                'pure_dp_epsilon': pure_dp_epsilon(int(queries.size), params.beta),
            },
            metadata={
                'label_agreement': self.label_agreement(dataset, queries, labels),
                'mean_teacher_nodes': float(np.mean([o.teacher_subgraph_size for o in outcomes])),
                'private_reads': tracker.reads(graph_name=private.name),
            },
        )
        logger.info(
            f"PrivGNN done: accuracy={accuracy:.4f}, eps={tight.epsilon:.4f} (alpha={tight.optimal_order}), "
            f"crude={crude:.4f}, {report.wall_time_s:.1f}s"
        )
        return PipelineResult(student=student, outcomes=outcomes, report=report, tracker=tracker)

    def _answer_queries(
        self, queries: np.ndarray, dataset: GraphDataset, tracker: AccessTracker
    ) -> List[QueryOutcome]:
        config: PrivGnnConfig = self.config
        order = np.arange(queries.size)
        if config.schedule_seed is not None:
            order = np.random.default_rng(config.schedule_seed).permutation(queries.size)
        results: List[Optional[QueryOutcome]] = [None] * queries.size
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            futures = {
                int(i): pool.submit(self.answer_query, int(i), int(queries[i]), dataset, tracker)
                for i in order
            }
            # barrier: the student only starts once every query is answered
            step = max(1, queries.size // 10)
            for done, (i, future) in enumerate(futures.items(), start=1):
                results[i] = future.result()
                if done % step == 0 or done == queries.size:
                    logger.info(f"Answered {done}/{queries.size} queries")
        return results

    def answer_query(
        self, index: int, node: int, dataset: GraphDataset, tracker: AccessTracker
    ) -> QueryOutcome:
        """Answer query ``index`` on public node ``node`` using only its own random streams.

        ``dataset.private`` must be the tracked private graph.
        """
        config: PrivGnnConfig = self.config
        params = config.privacy
        seed = config.master_seed
        public = dataset.public
        private = dataset.private

        with tracker.phase(f"selection:{index}"):
            sample = self._shared_sample
            if sample is None:
                sample = poisson_sample(private, params.gamma, derive_rng(seed, Stream.QUERY_JOB, index, SAMPLE))
            if len(sample) > 0:
                neighbours = knn_select(public.features[node], sample, private, config.k_neighbors, config.metric)
                teacher_graph = induced_subgraph(private, neighbours, name=f"teacher:{index}").with_tracker(tracker)

        if len(sample) == 0:
            # no teacher: the released label does not depend on private data
            logger.warning(f"Query {index} (node {node}): empty Poisson sample, releasing from a uniform posterior")
            neighbours = NodeSet.empty()
            posterior = np.full(dataset.num_classes, 1.0 / dataset.num_classes)
        else:
            posterior = self._teacher_posterior(index, node, teacher_graph, dataset, tracker)

        if config.noise_free:
            label = int(np.argmax(posterior))
        else:
            label = noisy_pseudo_label(posterior, params.beta, derive_rng(seed, Stream.QUERY_JOB, index, NOISE))
        logger.debug(f"query {index} node {node}: |V̂|={len(sample)}, teacher nodes={len(neighbours)}, label={label}")
        return QueryOutcome(
            query_index=index,
            query_node=node,
            posterior=posterior,
            pseudo_label=label,
            teacher_subgraph_size=len(neighbours),
            sampled_private=len(sample),
        )

    def _teacher_posterior(
        self, index: int, node: int, teacher_graph: Graph, dataset: GraphDataset, tracker: AccessTracker
    ) -> np.ndarray:
        config: PrivGnnConfig = self.config
        seed = config.master_seed
        with tracker.phase(f"teacher:{index}", forbid=frozenset({dataset.private.name})):
            teacher = build_model(
                config.teacher, teacher_graph.feature_dim, dataset.num_classes,
                derive_rng(seed, Stream.QUERY_JOB, index, TEACHER_INIT),
            )
            try:
                train(
                    teacher, teacher_graph, teacher_graph.all_nodes(), teacher_graph.labels, config.teacher,
                    derive_rng(seed, Stream.QUERY_JOB, index, TEACHER_TRAIN), query_id=index,
                )
            except TrainingDivergenceError:
                logger.error(f"Teacher for query {index} (node {node}) diverged")
                raise
            return predict_posterior(teacher, dataset.public, node)


def privgnn_run(config: PrivGnnConfig, dataset: GraphDataset):
    """Convenience wrapper returning (student, report)."""
    result = PrivGnnPipeline(config).run(dataset)
    return result.student, result.report
