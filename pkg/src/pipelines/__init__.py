"""Release pipelines and baselines."""

from .labeling import noisy_pseudo_label, noisy_vote_label
from .base_pipeline import PipelineResult, ReleasePipeline, Stream, derive_rng
from .privgnn_pipeline import PrivGnnPipeline, privgnn_run
from .pate_pipeline import PatePipeline, pate_run
from .baselines import BASELINES, baseline_b1, baseline_b2, run_baseline

__all__ = [
    'noisy_pseudo_label',
    'noisy_vote_label',
    'PipelineResult',
    'ReleasePipeline',
    'Stream',
    'derive_rng',
    'PrivGnnPipeline',
    'privgnn_run',
    'PatePipeline',
    'pate_run',
    'BASELINES',
    'baseline_b1',
    'baseline_b2',
    'run_baseline',
]
