"""Base interface for full-batch node classifiers."""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from schemas import ModelConfig

logger = logging.getLogger(__name__)


def torch_generator(rng: np.random.Generator) -> torch.Generator:
    """CPU torch generator seeded from a numpy stream."""
    return torch.Generator().manual_seed(int(rng.integers(2**63 - 1)))


class BaseClassifier(nn.Module, ABC):
    """Layer stack: linear → [BatchNorm] → ReLU → dropout, log-softmax on top.

    Subclasses build ``self.layers`` and supply the per-layer call. The shared
    trunk handles batch norm after the first layer, activations, dropout and
    the output log-softmax. Parameters are float64.
    """

    requires_structure = True

    def __init__(self, config: ModelConfig, input_dim: int, num_classes: int, rng: np.random.Generator):
        """Initialize parameters.

        Args:
            config: Model hyperparameters
            input_dim: Feature dimension d
            num_classes: Output classes C
            rng: Generator used for weight initialisation only
        """
        super().__init__()
        if config.num_classes is not None and config.num_classes != num_classes:
            raise ValueError(f"config expects {config.num_classes} classes, data has {num_classes}")
        if input_dim < 1 or num_classes < 1:
            raise ValueError(f"input_dim and num_classes must be positive, got {input_dim}, {num_classes}")
        self.config = config
        self.input_dim = int(input_dim)
        self.num_classes = int(num_classes)
        self.num_layers = config.num_layers
        self.dims = [self.input_dim] + [config.hidden_dim] * (self.num_layers - 1) + [self.num_classes]
        self.use_batch_norm = config.batch_norm_after_first and self.num_layers > 1

        self.layers = nn.ModuleList(
            self._make_layer(self.dims[i], self.dims[i + 1]) for i in range(self.num_layers)
        )
        self.bn = nn.BatchNorm1d(self.dims[1]) if self.use_batch_norm else None
        self.double()
        self._reset_parameters(torch_generator(rng))

    @abstractmethod
    def _make_layer(self, fan_in: int, fan_out: int) -> nn.Module:
        """Build one linear layer."""
        pass

    @abstractmethod
    def _apply_layer(self, layer: nn.Module, h: torch.Tensor, mean_adj: Optional[torch.Tensor]) -> torch.Tensor:
        pass

    @torch.no_grad()
    def _reset_parameters(self, generator: torch.Generator) -> None:
        # U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every linear weight and bias
        for module in self.modules():
            if isinstance(module, nn.Linear):
                bound = 1.0 / np.sqrt(module.in_features)
                module.weight.uniform_(-bound, bound, generator=generator)
                if module.bias is not None:
                    module.bias.uniform_(-bound, bound, generator=generator)

    @torch.no_grad()
    def zero_weights(self) -> None:
        """Set every parameter to zero (batch-norm scale included)."""
        for param in self.parameters():
            param.zero_()

    def forward(
        self,
        features: torch.Tensor,
        mean_adj: Optional[torch.Tensor] = None,
        generator: Optional[torch.Generator] = None,
    ) -> torch.Tensor:
        """Log-probabilities for every node."""
        if features.shape[1] != self.input_dim:
            raise ValueError(f"expected {self.input_dim} features, got {features.shape[1]}")
        dropout = self.config.dropout if self.training else 0.0
        if dropout > 0 and generator is None:
            raise ValueError("training with dropout needs a random generator")

        h = features
        for index, layer in enumerate(self.layers):
            h = self._apply_layer(layer, h, mean_adj)
            if index == self.num_layers - 1:
                break
            if index == 0 and self.bn is not None:
                h = self.bn(h)
            h = F.relu(h)
            if dropout > 0:
                # F.dropout draws from the global stream; masks here follow the job's generator
                keep = torch.full_like(h, 1.0 - dropout)
                h = h * torch.bernoulli(keep, generator=generator) / (1.0 - dropout)
        return F.log_softmax(h, dim=1)

    def parameter_count(self) -> int:
        return int(sum(p.numel() for p in self.parameters()))

    def all_finite(self) -> bool:
        return all(torch.isfinite(p).all() for p in self.parameters())

    def extra_repr(self) -> str:
        return f"dims={self.dims}, batch_norm={self.use_batch_norm}"
