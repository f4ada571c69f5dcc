"""Loading experiment, SBM and sweep files and resolving their datasets."""

import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import yaml
from pydantic import ValidationError

from schemas import DatasetSource, ExperimentConfig, SbmSpec, SweepSpec
from graphs import GraphDataset, load_dataset
from .synthetic import generate_sbm

logger = logging.getLogger(__name__)


class ConfigFileError(ValueError):
    """A YAML config could not be read or validated."""


def load_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigFileError(f"config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigFileError(f"could not parse {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigFileError(f"{path} must contain a mapping at the top level")
    return data


def _validate(model, path: Union[str, Path]):
    data = load_yaml(path)
    try:
        return model(**data)
    except ValidationError as e:
        raise ConfigFileError(f"invalid {model.__name__} in {path}:\n{e}")


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    return _validate(ExperimentConfig, path)


def load_sweep_spec(path: Union[str, Path]) -> SweepSpec:
    return _validate(SweepSpec, path)


def load_sbm_spec(path: Union[str, Path]) -> SbmSpec:
    """SBM spec file; accepts a bare spec or one nested under ``synthetic``."""
    data = load_yaml(path)
    data.pop('version', None)
    data = data.get('synthetic', data)
    try:
        return SbmSpec(**data)
    except ValidationError as e:
        raise ConfigFileError(f"invalid SbmSpec in {path}:\n{e}")


def resolve_dataset(source: DatasetSource, base_dir: Union[str, Path, None] = None) -> GraphDataset:
    """Load the dataset directory or generate the synthetic graph."""
    if source.synthetic is not None:
        return generate_sbm(source.synthetic, np.random.default_rng(source.seed))
    path = Path(source.path)
    if not path.is_absolute() and base_dir is not None and not path.exists():
        path = Path(base_dir) / path
    return load_dataset(path)
