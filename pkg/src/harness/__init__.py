"""Experiment orchestration: synthetic data, sweeps and reports."""

from .synthetic import generate_sbm, as_networkx
from .experiment import (
    ConfigFileError,
    load_yaml,
    load_experiment_config,
    load_sweep_spec,
    load_sbm_spec,
    resolve_dataset,
)
from .sweep import SWEEP_COLUMNS, SweepResult, run_sweep
from .published_budgets import (
    COMPARISON_COLUMNS,
    DEFAULT_PUBLISHED_VALUES,
    load_published_values,
    accounting_row,
    published_accounting_rows,
    compare_to_published,
)
from .reporting import reports_table, write_table, write_record, read_table

__all__ = [
    'generate_sbm',
    'as_networkx',
    'ConfigFileError',
    'load_yaml',
    'load_experiment_config',
    'load_sweep_spec',
    'load_sbm_spec',
    'resolve_dataset',
    'SWEEP_COLUMNS',
    'SweepResult',
    'run_sweep',
    'COMPARISON_COLUMNS',
    'DEFAULT_PUBLISHED_VALUES',
    'load_published_values',
    'accounting_row',
    'published_accounting_rows',
    'compare_to_published',
    'reports_table',
    'write_table',
    'write_record',
    'read_table',
]
