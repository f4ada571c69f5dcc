"""GraphSAGE with the mean aggregator."""

from typing import Optional

import torch
import torch.nn as nn

from .base_model import BaseClassifier


class SageLayer(nn.Module):
    """h·W_self + b + mean_{u∈N(v)} h_u·W_neigh."""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.lin_self = nn.Linear(in_channels, out_channels, bias=True)
        self.lin_neigh = nn.Linear(in_channels, out_channels, bias=False)

    def forward(self, x: torch.Tensor, mean_adj: torch.Tensor) -> torch.Tensor:
        neighbor_out = torch.sparse.mm(mean_adj, x)
        return self.lin_self(x) + self.lin_neigh(neighbor_out)


class GraphSageClassifier(BaseClassifier):
    """Stack of mean-aggregator SAGE layers.

    Isolated nodes aggregate to zero, so only the self path contributes.
    """

    requires_structure = True

    def _make_layer(self, fan_in: int, fan_out: int) -> nn.Module:
        return SageLayer(fan_in, fan_out)

    def _apply_layer(self, layer: nn.Module, h: torch.Tensor, mean_adj: Optional[torch.Tensor]) -> torch.Tensor:
        if mean_adj is None:
            raise ValueError("GraphSAGE layers need the mean adjacency")
        return layer(h, mean_adj)
