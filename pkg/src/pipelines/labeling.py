"""Noisy argmax labelling."""

import numpy as np


def noisy_pseudo_label(posterior: np.ndarray, beta: float, rng: np.random.Generator) -> int:
    """argmax of posterior + Laplace(0, β) noise on each class; ties go to the lowest class."""
    posterior = np.asarray(posterior, dtype=np.float64)
    if posterior.ndim != 1 or posterior.size == 0:
        raise ValueError("posterior must be a non-empty vector")
    if (posterior < -1e-12).any() or abs(posterior.sum() - 1.0) > 1e-6:
        raise ValueError("posterior must be a probability vector")
    if not beta > 0:
        raise ValueError(f"Laplace scale must be positive, got {beta}")
    return int(np.argmax(posterior + rng.laplace(0.0, beta, size=posterior.size)))


def noisy_vote_label(votes: np.ndarray, beta: float, rng: np.random.Generator) -> int:
    """argmax of per-class vote counts + Laplace(0, β) noise."""
    votes = np.asarray(votes, dtype=np.float64)
    if votes.ndim != 1 or votes.size == 0 or (votes < 0).any():
        raise ValueError("votes must be a non-empty vector of counts")
    if not beta > 0:
        raise ValueError(f"Laplace scale must be positive, got {beta}")
    return int(np.argmax(votes + rng.laplace(0.0, beta, size=votes.size)))
