"""Torch GraphSAGE/MLP engine."""

from .base_model import BaseClassifier
from .sage_model import GraphSageClassifier, SageLayer
from .mlp_model import MlpClassifier
from .training import (
    TrainingDivergenceError,
    TrainingLog,
    build_model,
    graph_tensors,
    train,
    forward,
    predict_proba,
    predict_posterior,
    evaluate_accuracy,
)
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    'BaseClassifier',
    'GraphSageClassifier',
    'SageLayer',
    'MlpClassifier',
    'TrainingDivergenceError',
    'TrainingLog',
    'build_model',
    'graph_tensors',
    'train',
    'forward',
    'predict_proba',
    'predict_posterior',
    'evaluate_accuracy',
    'save_checkpoint',
    'load_checkpoint',
]
