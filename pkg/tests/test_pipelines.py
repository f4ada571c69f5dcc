"""Tests for noisy labelling, the PrivGNN/PATE pipelines and the baselines."""

import logging
import math

import numpy as np
import pytest

from schemas import (
    BaselineConfig, ModelConfig, ModelKind, PateConfig, PrivacyParams, PrivGnnConfig,
)
from graphs import ANY_GRAPH, AccessTracker, PrivacyAccessError
from accounting import describe_budget, pate_budget, privgnn_budget
from pipelines import (
    PatePipeline,
    PrivGnnPipeline,
    Stream,
    baseline_b1,
    baseline_b2,
    derive_rng,
    noisy_pseudo_label,
    noisy_vote_label,
    pate_run,
    privgnn_run,
    run_baseline,
)


def laplace_gap_tail(gap, beta):
    """P(L1 − L2 > gap) for two iid Laplace(0, β) draws."""
    t = gap / beta
    return 0.5 * (1.0 + t / 2.0) * math.exp(-t)


def with_privacy(config, **privacy):
    return config.model_copy(update={'privacy': config.privacy.model_copy(update=privacy)})


class TestNoisyLabels:
    def test_vanishing_noise_is_argmax(self, rng):
        assert noisy_pseudo_label(np.array([0.1, 0.6, 0.3]), 1e-9, rng) == 1
        assert noisy_vote_label(np.array([0, 2]), 1e-9, rng) == 1

    def test_single_class(self, rng):
        assert all(noisy_pseudo_label(np.array([1.0]), 5.0, rng) == 0 for _ in range(20))

    def test_flip_rate_matches_laplace_tail(self):
        rng = np.random.default_rng(11)
        draws = 100_000
        flips = sum(noisy_pseudo_label(np.array([0.7, 0.3]), 0.5, rng) for _ in range(draws))
        assert flips / draws == pytest.approx(laplace_gap_tail(0.4, 0.5), abs=0.01)

    def test_vote_flip_rate(self):
        rng = np.random.default_rng(12)
        draws = 100_000
        flips = sum(noisy_vote_label(np.array([30, 20]), 2.0, rng) for _ in range(draws))
        assert flips / draws == pytest.approx(laplace_gap_tail(10.0, 2.0), abs=0.003)

    @pytest.mark.parametrize("posterior", [[0.5, 0.6], [-0.2, 1.2], []])
    def test_rejects_non_distributions(self, rng, posterior):
        with pytest.raises(ValueError):
            noisy_pseudo_label(np.array(posterior), 1.0, rng)

    def test_rejects_bad_scale(self, rng):
        with pytest.raises(ValueError):
            noisy_pseudo_label(np.array([0.5, 0.5]), 0.0, rng)
        with pytest.raises(ValueError):
            noisy_vote_label(np.array([-1, 3]), 1.0, rng)


def test_derived_streams_are_independent_and_reproducible():
    a = derive_rng(3, Stream.QUERY_JOB, 0).random(4)
    assert np.array_equal(a, derive_rng(3, Stream.QUERY_JOB, 0).random(4))
    assert not np.array_equal(a, derive_rng(3, Stream.QUERY_JOB, 1).random(4))
    assert not np.array_equal(a, derive_rng(4, Stream.QUERY_JOB, 0).random(4))
    with pytest.raises(ValueError):
        derive_rng(-1)


class TestPrivGnn:
    def test_report(self, tiny_dataset, tiny_privgnn_config):
        result = PrivGnnPipeline(tiny_privgnn_config).run(tiny_dataset)
        report = result.report
        tight, crude = privgnn_budget(tiny_privgnn_config.privacy)
        summary = describe_budget(tiny_privgnn_config.privacy)

        assert report.method == "privgnn"
        assert report.dataset == "tiny"
        assert report.num_queries == 8
        assert 0.0 <= report.accuracy <= 1.0
        assert report.epsilon == tight.epsilon == summary['epsilon']
        assert report.optimal_alpha == tight.optimal_order
        assert report.crude_epsilon == crude
        assert report.epsilon <= report.crude_epsilon
        assert report.params['alternative_epsilon'] == summary['alternative_epsilon']
        assert len(result.outcomes) == 8
        assert len(set(o.query_node for o in result.outcomes)) == 8
        assert all(o.teacher_subgraph_size <= 10 for o in result.outcomes)
        assert all(np.isclose(o.posterior.sum(), 1.0) for o in result.outcomes)
        assert set(tiny_dataset.split.train.tolist()) >= {o.query_node for o in result.outcomes}

    def test_student_never_reads_private_data(self, tiny_dataset, tiny_privgnn_config):
        result = PrivGnnPipeline(tiny_privgnn_config).run(tiny_dataset)
        private_name = tiny_dataset.private.name
        assert result.tracker.reads(phase="student") == 0
        assert result.tracker.reads(graph_name=private_name) > 0
        assert result.report.metadata['private_reads'] == result.tracker.reads(graph_name=private_name)
        teacher_phases = [p for p in result.tracker.summary() if p.startswith("teacher:")]
        assert all(result.tracker.reads(phase=p, graph_name=private_name) == 0 for p in teacher_phases)

    def test_forbidden_read_raises(self, tiny_dataset):
        tracker = AccessTracker()
        private = tiny_dataset.private.with_tracker(tracker)
        with tracker.phase("student", forbid=frozenset({ANY_GRAPH})):
            with pytest.raises(PrivacyAccessError) as err:
                private.labels
        assert err.value.phase == "student"
        with tracker.phase("teacher:0", forbid=frozenset({private.name})):
            with pytest.raises(PrivacyAccessError):
                private.neighbors(0)
        assert tracker.reads() == 0

    def test_deterministic_across_worker_counts(self, tiny_dataset, tiny_privgnn_config):
        serial = PrivGnnPipeline(tiny_privgnn_config).run(tiny_dataset)
        threaded = PrivGnnPipeline(
            tiny_privgnn_config.model_copy(update={'max_workers': 4, 'schedule_seed': 99})
        ).run(tiny_dataset)
        assert np.array_equal(serial.pseudo_labels, threaded.pseudo_labels)
        for a, b in zip(serial.outcomes, threaded.outcomes):
            assert np.array_equal(a.posterior, b.posterior)
        assert serial.report.to_record(include_timing=False) == threaded.report.to_record(include_timing=False)

    def test_same_seed_same_record(self, tiny_dataset, tiny_privgnn_config):
        first = privgnn_run(tiny_privgnn_config, tiny_dataset)[1]
        second = privgnn_run(tiny_privgnn_config, tiny_dataset)[1]
        assert first.to_record(include_timing=False) == second.to_record(include_timing=False)

    def test_near_noiseless_matches_noise_free(self, tiny_dataset, tiny_privgnn_config):
        clean = PrivGnnPipeline(tiny_privgnn_config.model_copy(update={'noise_free': True})).run(tiny_dataset)
        quiet = PrivGnnPipeline(with_privacy(tiny_privgnn_config, lambda_=1e6)).run(tiny_dataset)
        assert np.array_equal(clean.pseudo_labels, quiet.pseudo_labels)
        assert clean.report.accuracy == quiet.report.accuracy

    def test_shared_sample_warns(self, tiny_dataset, tiny_privgnn_config, caplog):
        config = tiny_privgnn_config.model_copy(update={'resample_per_query': False})
        with caplog.at_level(logging.WARNING):
            result = PrivGnnPipeline(config).run(tiny_dataset)
        assert "fresh sample per query" in caplog.text
        assert len({o.sampled_private for o in result.outcomes}) == 1

    def test_too_many_queries(self, tiny_dataset, tiny_privgnn_config):
        with pytest.raises(ValueError, match="public training nodes"):
            PrivGnnPipeline(with_privacy(tiny_privgnn_config, num_queries=21)).run(tiny_dataset)

    def test_empty_sample_releases_from_uniform_posterior(self, tiny_dataset, tiny_privgnn_config, caplog):
        config = with_privacy(tiny_privgnn_config, gamma=0.0)
        with caplog.at_level(logging.WARNING):
            result = PrivGnnPipeline(config).run(tiny_dataset)
        assert "empty Poisson sample" in caplog.text
        assert len(result.outcomes) == 8
        for outcome in result.outcomes:
            assert outcome.sampled_private == 0
            assert outcome.teacher_subgraph_size == 0
            assert np.allclose(outcome.posterior, 0.5)

    def test_low_sampling_ratio_completes(self, tiny_dataset, tiny_privgnn_config):
        result = PrivGnnPipeline(with_privacy(tiny_privgnn_config, gamma=0.01)).run(tiny_dataset)
        sizes = [o.sampled_private for o in result.outcomes]
        assert len(sizes) == 8
        assert all(o.teacher_subgraph_size == min(s, 10) for o, s in zip(result.outcomes, sizes))

    @pytest.mark.parametrize("pipeline, config_fixture", [
        (PrivGnnPipeline, "tiny_privgnn_config"),
        (PatePipeline, "tiny_pate_config"),
    ])
    def test_student_phase_cannot_reach_private_graph(self, tiny_dataset, pipeline, config_fixture, request, mocker):
        seen = {}

        class Recording(pipeline):
            def train_student(self, dataset, *args, **kwargs):
                seen['dataset'] = dataset
                return super().train_student(dataset, *args, **kwargs)

        mocker.patch(
            'pipelines.base_pipeline.build_model', side_effect=lambda *a, **k: seen['dataset'].private.features
        )
        with pytest.raises(PrivacyAccessError) as err:
            Recording(request.getfixturevalue(config_fixture)).run(tiny_dataset)
        assert err.value.phase == "student"

    def test_k_larger_than_sample_uses_whole_sample(self, tiny_dataset, tiny_privgnn_config):
        config = tiny_privgnn_config.model_copy(update={'k_neighbors': 1000})
        result = PrivGnnPipeline(config).run(tiny_dataset)
        assert all(o.teacher_subgraph_size == o.sampled_private for o in result.outcomes)

    def test_teacher_divergence_propagates(self, tiny_dataset, tiny_privgnn_config, mocker):
        from models import TrainingDivergenceError
        mocker.patch('pipelines.privgnn_pipeline.train', side_effect=TrainingDivergenceError(3, 0))
        with pytest.raises(TrainingDivergenceError):
            PrivGnnPipeline(tiny_privgnn_config).run(tiny_dataset)


@pytest.fixture
def tiny_pate_config(fast_model):
    return PateConfig(
        privacy=PrivacyParams(lambda_=1.0, num_queries=8, delta=1e-3),
        n_teachers=4,
        gnn_teacher=fast_model,
        mlp_teacher=ModelConfig(kind=ModelKind.MLP, hidden_dim=16, epochs=25, dropout=0.0),
        student=fast_model,
        master_seed=3,
    )


class TestPate:
    def test_partition_is_disjoint_cover(self, tiny_dataset, tiny_pate_config):
        parts = PatePipeline(tiny_pate_config).partition(tiny_dataset.private)
        assert [len(p) for p in parts] == [10, 10, 10, 10]
        joined = np.concatenate([p.ids for p in parts])
        assert sorted(joined.tolist()) == list(range(40))

    def test_too_many_teachers(self, tiny_dataset, tiny_pate_config):
        config = tiny_pate_config.model_copy(update={'n_teachers': 30})
        with pytest.raises(ValueError, match="30 teachers"):
            PatePipeline(config).run(tiny_dataset)

    def test_votes_and_budget(self, tiny_dataset, tiny_pate_config):
        result = PatePipeline(tiny_pate_config).run(tiny_dataset)
        votes = result.extras['votes']
        assert votes.shape == (8, 2)
        assert (votes.sum(axis=1) == 4).all()
        assert result.report.method == "pate_g"
        assert result.report.epsilon == pate_budget(1.0, 8, 1e-3).epsilon
        assert result.tracker.reads(phase="student") == 0

    def test_mlp_teachers(self, tiny_dataset, tiny_pate_config):
        _, report = pate_run(tiny_pate_config, tiny_dataset, n_teachers=2, teacher_kind=ModelKind.MLP)
        assert report.method == "pate_m"
        assert report.params['n_teachers'] == 2

    def test_costs_more_than_privgnn_at_equal_noise(self, tiny_dataset, tiny_pate_config):
        _, pate = pate_run(tiny_pate_config, tiny_dataset)
        privgnn = privgnn_budget(PrivacyParams(gamma=0.5, lambda_=1.0, num_queries=8, delta=1e-3))[0]
        assert pate.epsilon > privgnn.epsilon


class TestBaselines:
    def test_deterministic(self, tiny_dataset, fast_model):
        assert baseline_b1(tiny_dataset, fast_model, 5)[0] == baseline_b1(tiny_dataset, fast_model, 5)[0]
        assert baseline_b2(tiny_dataset, fast_model, 5)[0] == baseline_b2(tiny_dataset, fast_model, 5)[0]

    def test_report_is_non_private(self, tiny_dataset, fast_model):
        report = run_baseline('b2', tiny_dataset, BaselineConfig(model=fast_model))
        assert report.method == 'b2'
        assert math.isinf(report.epsilon)
        assert report.delta == 0.0
        assert "epsilon: inf" in report.to_record()

    def test_unknown_baseline(self, tiny_dataset):
        with pytest.raises(ValueError):
            run_baseline('b3', tiny_dataset, BaselineConfig())


def desk_config(teacher, student, lam, seed=0, queries=150):
    return PrivGnnConfig(
        privacy=PrivacyParams(gamma=0.3, lambda_=lam, num_queries=queries, delta=1e-4),
        k_neighbors=100,
        teacher=teacher,
        student=student,
        master_seed=seed,
        max_workers=4,
    )


@pytest.mark.slow
class TestDeskExperiment:
    def test_accuracy_follows_noise(self, desk_dataset, desk_models):
        teacher, student = desk_models
        low_noise = privgnn_run(desk_config(teacher, student, 1.0), desk_dataset)[1]
        high_noise = privgnn_run(desk_config(teacher, student, 0.05), desk_dataset)[1]
        assert low_noise.accuracy >= 0.8
        assert low_noise.accuracy > high_noise.accuracy

        b1, _ = baseline_b1(desk_dataset, student)
        b2, _ = baseline_b2(desk_dataset, student)
        assert b1 >= high_noise.accuracy
        assert b2 >= high_noise.accuracy

    def test_mean_accuracy_non_decreasing_in_lambda(self, desk_dataset):
        teacher = ModelConfig(epochs=40, weight_decay=5e-4)
        student = ModelConfig(epochs=150, weight_decay=5e-4)
        means = []
        for lam in (0.05, 0.2, 1.0):
            runs = [privgnn_run(desk_config(teacher, student, lam, seed), desk_dataset)[1] for seed in range(8)]
            means.append(np.mean([r.accuracy for r in runs]))
        assert means[0] <= means[1] <= means[2]

    def test_baselines_reach_ninety_percent(self, desk_dataset, desk_models):
        _, student = desk_models
        b1, _ = baseline_b1(desk_dataset, student)
        b2, _ = baseline_b2(desk_dataset, student)
        assert b1 >= 0.9
        assert b2 >= 0.9

    @pytest.mark.xfail(strict=False, reason="vote gaps of up to n_teachers absorb Laplace noise that swamps a posterior gap")
    def test_pate_g_trails_privgnn_at_equal_noise(self, desk_dataset, desk_models):
        teacher, student = desk_models
        privgnn = privgnn_run(desk_config(teacher, student, 0.2), desk_dataset)[1]
        pate = PateConfig(
            privacy=PrivacyParams(lambda_=0.2, num_queries=150, delta=1e-4),
            n_teachers=20,
            gnn_teacher=teacher,
            student=student,
            max_workers=4,
        )
        pate_g = pate_run(pate, desk_dataset)[1]
        assert pate_g.epsilon > privgnn.epsilon
        assert pate_g.accuracy < privgnn.accuracy
