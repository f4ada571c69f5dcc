"""Validated configuration models for experiments, models and sweeps.

Everything a run depends on is captured here, so a config dump (see
``config_hash``) identifies a run together with its seed.
"""

import logging
import math
from enum import Enum
from itertools import product
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .privacy_schemas import ConversionForm

logger = logging.getLogger(__name__)

SWEEP_AXES = ('lambda', 'gamma', 'k_neighbors', 'query_count')


class ModelKind(str, Enum):
    """Classifier families the engine can train."""
    GNN = "gnn"
    MLP = "mlp"


class KnnMetric(str, Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


class _Frozen(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True, populate_by_name=True)


class ModelConfig(_Frozen):
    """Hyperparameters of a GraphSAGE or MLP node classifier."""
    kind: ModelKind = ModelKind.GNN
    hidden_dim: int = Field(64, ge=1)
    num_layers: int = Field(2, ge=1)
    dropout: float = Field(0.5, ge=0.0, lt=1.0)
    learning_rate: float = Field(0.01, gt=0.0)
    epochs: int = Field(500, ge=1)
    weight_decay: float = Field(0.0, ge=0.0)
    batch_norm_after_first: bool = True
    num_classes: Optional[int] = Field(None, ge=1)

    @model_validator(mode='before')
    @classmethod
    def _default_depth(cls, data: Any) -> Any:
        # GNNs default to two layers, MLPs to three
        if isinstance(data, dict) and 'num_layers' not in data:
            kind = data.get('kind', ModelKind.GNN)
            if str(getattr(kind, 'value', kind)) == ModelKind.MLP.value:
                data = {**data, 'num_layers': 3}
        return data


class PrivacyParams(_Frozen):
    """Sampling ratio γ, noise rate λ = 1/β, query count |Q| and target δ."""
    gamma: float = Field(0.3, ge=0.0, le=1.0)
    lambda_: float = Field(..., alias='lambda', gt=0.0)
    num_queries: int = Field(..., ge=0)
    delta: float = Field(..., gt=0.0, lt=1.0)

    @field_validator('lambda_')
    @classmethod
    def _finite_lambda(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("lambda must be finite")
        return value

    @property
    def beta(self) -> float:
        """Laplace scale."""
        return 1.0 / self.lambda_

    def check_delta(self, num_private_nodes: int) -> bool:
        """True when δ < 1/N. Logs a warning otherwise."""
        if num_private_nodes > 0 and self.delta >= 1.0 / num_private_nodes:
            logger.warning(
                f"delta={self.delta} is not below 1/N={1.0 / num_private_nodes:.3g} "
                f"for N={num_private_nodes} private nodes"
            )
            return False
        return True


class PrivGnnConfig(_Frozen):
    """Settings for one private release run."""
    privacy: PrivacyParams
    k_neighbors: int = Field(100, ge=1)
    metric: KnnMetric = KnnMetric.EUCLIDEAN
    teacher: ModelConfig = Field(default_factory=ModelConfig)
    student: ModelConfig = Field(default_factory=ModelConfig)
    resample_per_query: bool = True
    noise_free: bool = False
    master_seed: int = 0
    max_workers: int = Field(1, ge=1)
    schedule_seed: Optional[int] = None
    max_order: int = Field(32, ge=3)
    conversion: ConversionForm = ConversionForm.SHIFTED

    @property
    def query_count(self) -> int:
        return self.privacy.num_queries


class PateConfig(_Frozen):
    """Settings for the PATE comparison runs (PATE-G and PATE-M)."""
    privacy: PrivacyParams
    n_teachers: int = Field(20, ge=2)
    teacher_kind: ModelKind = ModelKind.GNN
    gnn_teacher: ModelConfig = Field(default_factory=ModelConfig)
    mlp_teacher: ModelConfig = Field(default_factory=lambda: ModelConfig(kind=ModelKind.MLP))
    student: ModelConfig = Field(default_factory=ModelConfig)
    master_seed: int = 0
    max_workers: int = Field(1, ge=1)
    max_order: int = Field(32, ge=2)

    @property
    def teacher(self) -> ModelConfig:
        return self.mlp_teacher if self.teacher_kind == ModelKind.MLP else self.gnn_teacher

    @property
    def method(self) -> str:
        return 'pate_m' if self.teacher_kind == ModelKind.MLP else 'pate_g'


class BaselineConfig(_Frozen):
    model: ModelConfig = Field(default_factory=ModelConfig)
    master_seed: int = 0


class SbmSpec(_Frozen):
    """Stochastic block model with Gaussian class-conditional features."""
    num_classes: int = Field(4, ge=1)
    nodes_per_class: int = Field(200, ge=1)
    intra_p: float = Field(0.05, ge=0.0, le=1.0)
    inter_p: float = Field(0.002, ge=0.0, le=1.0)
    feature_dim: int = Field(16, ge=1)
    class_mean_separation: float = Field(1.0, ge=0.0)
    feature_noise_sigma: float = Field(0.5, ge=0.0)
    private_fraction: float = Field(0.5, ge=0.0, le=1.0)
    public_train_fraction: float = Field(0.25, ge=0.0, le=1.0)
    public_test_fraction: float = Field(0.25, ge=0.0, le=1.0)
    name: str = "sbm"

    @model_validator(mode='after')
    def _check(self) -> 'SbmSpec':
        if self.inter_p >= self.intra_p:
            raise ValueError(f"inter_p ({self.inter_p}) must be below intra_p ({self.intra_p})")
        total = self.private_fraction + self.public_train_fraction + self.public_test_fraction
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {total}")
        if self.feature_dim < self.num_classes:
            raise ValueError(
                f"feature_dim ({self.feature_dim}) must be at least num_classes ({self.num_classes})"
            )
        return self


class DatasetSource(_Frozen):
    """Either a dataset directory or a synthetic SBM spec."""
    path: Optional[str] = None
    synthetic: Optional[SbmSpec] = None
    seed: int = 0

    @model_validator(mode='after')
    def _one_source(self) -> 'DatasetSource':
        if (self.path is None) == (self.synthetic is None):
            raise ValueError("dataset needs exactly one of 'path' or 'synthetic'")
        return self


class ExperimentConfig(_Frozen):
    """Top-level experiment file (``version: 1``)."""
    version: Literal[1] = 1
    dataset: DatasetSource
    privgnn: Optional[PrivGnnConfig] = None
    pate: Optional[PateConfig] = None
    baseline: Optional[BaselineConfig] = None


class SweepSpec(_Frozen):
    """Cartesian grid over privacy knobs, run for every seed."""
    version: Literal[1] = 1
    base: ExperimentConfig
    axes: Dict[str, List[float]]
    seeds: List[int] = Field(default_factory=lambda: [0])
    parallel_cells: int = Field(1, ge=1)

    @model_validator(mode='after')
    def _check(self) -> 'SweepSpec':
        if self.base.privgnn is None:
            raise ValueError("sweep base config needs a 'privgnn' section")
        if not self.seeds:
            raise ValueError("sweep needs at least one seed")
        for name, values in self.axes.items():
            if name not in SWEEP_AXES:
                raise ValueError(f"unknown sweep axis '{name}', expected one of {SWEEP_AXES}")
            if not values:
                raise ValueError(f"sweep axis '{name}' has no values")
        for params in self.cells():
            self.cell_config(params)
        return self

    def cells(self) -> List[Dict[str, Any]]:
        """Parameter combinations in row-major order of the axes as written."""
        names = list(self.axes)
        return [dict(zip(names, combo)) for combo in product(*(self.axes[n] for n in names))]

    def cell_config(self, params: Dict[str, Any]) -> PrivGnnConfig:
        """Base privgnn config with one cell's overrides applied and re-validated."""
        base = self.base.privgnn
        privacy = base.privacy.model_dump(by_alias=True)
        top = base.model_dump(exclude={'privacy'})
        for name, value in params.items():
            if name == 'lambda':
                privacy['lambda'] = float(value)
            elif name == 'gamma':
                privacy['gamma'] = float(value)
            elif name == 'query_count':
                if int(value) != value:
                    raise ValueError(f"query_count must be an integer, got {value}")
                privacy['num_queries'] = int(value)
            elif name == 'k_neighbors':
                if int(value) != value:
                    raise ValueError(f"k_neighbors must be an integer, got {value}")
                top['k_neighbors'] = int(value)
        return PrivGnnConfig(privacy=PrivacyParams(**privacy), **top)
