"""Schema definitions for the PrivGNN workbench."""

from .privacy_schemas import ConversionForm, RdpCurve, DpGuarantee
from .experiment_schemas import QueryOutcome, ExperimentReport, SweepCell, config_hash
from .config_schemas import (
    ModelKind,
    KnnMetric,
    ModelConfig,
    PrivacyParams,
    PrivGnnConfig,
    PateConfig,
    BaselineConfig,
    SbmSpec,
    DatasetSource,
    ExperimentConfig,
    SweepSpec,
    SWEEP_AXES,
)

__all__ = [
    'ConversionForm',
    'RdpCurve',
    'DpGuarantee',
    'QueryOutcome',
    'ExperimentReport',
    'SweepCell',
    'config_hash',
    'ModelKind',
    'KnnMetric',
    'ModelConfig',
    'PrivacyParams',
    'PrivGnnConfig',
    'PateConfig',
    'BaselineConfig',
    'SbmSpec',
    'DatasetSource',
    'ExperimentConfig',
    'SweepSpec',
    'SWEEP_AXES',
]
