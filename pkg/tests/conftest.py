"""Shared fixtures. Puts ``src`` on the import path like ``run.py`` does."""

import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parents[1] / 'src'
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from schemas import ModelConfig, PrivacyParams, PrivGnnConfig, SbmSpec  # noqa: E402
from harness import generate_sbm  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tiny_spec():
    return SbmSpec(
        num_classes=2, nodes_per_class=40, intra_p=0.15, inter_p=0.01,
        feature_dim=4, class_mean_separation=2.0, feature_noise_sigma=0.5,
    )


@pytest.fixture(scope="session")
def tiny_dataset(tiny_spec):
    """80 nodes: 40 private, 20 public train, 20 public test."""
    return generate_sbm(tiny_spec, np.random.default_rng(0), name="tiny")


@pytest.fixture(scope="session")
def fast_model():
    return ModelConfig(hidden_dim=16, epochs=25, dropout=0.0)


@pytest.fixture
def tiny_privgnn_config(fast_model):
    return PrivGnnConfig(
        privacy=PrivacyParams(gamma=0.5, lambda_=1.0, num_queries=8, delta=1e-3),
        k_neighbors=10,
        teacher=fast_model,
        student=fast_model,
        master_seed=7,
    )


@pytest.fixture(scope="session")
def desk_dataset():
    """Default 4-class SBM used by the end-to-end checks."""
    return generate_sbm(SbmSpec(), np.random.default_rng(0), name="desk")


@pytest.fixture(scope="session")
def desk_models():
    teacher = ModelConfig(epochs=80, weight_decay=5e-4)
    student = ModelConfig(epochs=200, weight_decay=5e-4)
    return teacher, student
