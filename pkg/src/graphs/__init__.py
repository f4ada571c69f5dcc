"""Graph data structures, node-set operations and dataset IO."""

from .access import AccessTracker, PrivacyAccessError, ANY_GRAPH
from .graph_core import (
    Graph,
    GraphRole,
    NodeSet,
    poisson_sample,
    knn_select,
    induced_subgraph,
    l_hop_neighborhood,
)
from .dataset_io import DatasetFormatError, GraphDataset, PublicSplit, load_dataset, save_dataset

__all__ = [
    'AccessTracker',
    'PrivacyAccessError',
    'ANY_GRAPH',
    'Graph',
    'GraphRole',
    'NodeSet',
    'poisson_sample',
    'knn_select',
    'induced_subgraph',
    'l_hop_neighborhood',
    'DatasetFormatError',
    'GraphDataset',
    'PublicSplit',
    'load_dataset',
    'save_dataset',
]
