"""Structure-blind MLP classifier."""

from typing import Optional

import torch
import torch.nn as nn

from .base_model import BaseClassifier


class MlpClassifier(BaseClassifier):
    """Feed-forward network on node features alone."""

    requires_structure = False

    def _make_layer(self, fan_in: int, fan_out: int) -> nn.Module:
        return nn.Linear(fan_in, fan_out)

    def _apply_layer(self, layer: nn.Module, h: torch.Tensor, mean_adj: Optional[torch.Tensor]) -> torch.Tensor:
        return layer(h)
