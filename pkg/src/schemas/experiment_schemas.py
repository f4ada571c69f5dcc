"""Result records for query answering and experiment reporting."""

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass
class QueryOutcome:
    """Everything one private query produced."""
    query_index: int
    query_node: int
    posterior: np.ndarray
    pseudo_label: int
    teacher_subgraph_size: int
    sampled_private: int = 0


@dataclass
class ExperimentReport:
    """One run of one release method on one dataset."""
    method: str  # "privgnn", "pate_g", "pate_m", "b1", "b2"
    dataset: str
    config_hash: str
    seed: int
    accuracy: float
    epsilon: float
    delta: float
    num_queries: int
    optimal_alpha: Optional[int] = None
    crude_epsilon: Optional[float] = None
    wall_time_s: float = 0.0
    params: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_row(self, include_timing: bool = True) -> Dict[str, Any]:
        """Flat dict in a fixed column order, params inlined."""
        row: Dict[str, Any] = {
            'method': self.method,
            'dataset': self.dataset,
            'config_hash': self.config_hash,
            'seed': self.seed,
            'accuracy': self.accuracy,
            'epsilon': self.epsilon,
            'delta': self.delta,
            'num_queries': self.num_queries,
            'optimal_alpha': self.optimal_alpha,
            'crude_epsilon': self.crude_epsilon,
        }
        for key in sorted(self.params):
            row[key] = self.params[key]
        if include_timing:
            row['wall_time_s'] = self.wall_time_s
        return row

    def to_record(self, include_timing: bool = True) -> str:
        """`key: value` lines. Floats use repr so records compare byte-for-byte."""
        lines = []
        for key, value in self.to_row(include_timing=include_timing).items():
            lines.append(f"{key}: {_format_value(value)}")
        for key in sorted(self.metadata):
            lines.append(f"meta.{key}: {_format_value(self.metadata[key])}")
        return "\n".join(lines) + "\n"


def _format_value(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_format_value(value[k])}" for k in sorted(value)) + "}"
    return str(value)


SCHEDULE_FIELDS = frozenset({'max_workers', 'schedule_seed'})


def config_hash(payload: Dict[str, Any]) -> str:
    """Short sha256 of a config dump with sorted keys.

    Top-level scheduling fields are left out: they change execution order,
    never results.
    """
    kept = {key: value for key, value in payload.items() if key not in SCHEDULE_FIELDS}
    text = json.dumps(kept, sort_keys=True, default=str)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]


@dataclass
class SweepCell:
    """Aggregated result of one parameter combination across seeds."""
    index: int
    params: Dict[str, Any]
    reports: List[ExperimentReport] = field(default_factory=list)
    error: Optional[str] = None
