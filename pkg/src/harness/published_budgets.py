"""Side-by-side comparison of our budgets with published values."""

import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from schemas import ConversionForm, PrivacyParams
from accounting import DEFAULT_MAX_ORDER, pate_budget, privgnn_budget
from .experiment import load_yaml

logger = logging.getLogger(__name__)

DEFAULT_PUBLISHED_VALUES = Path(__file__).resolve().parents[2] / 'config' / 'published_budgets.yaml'

KEY_COLUMNS = ['mechanism', 'gamma', 'lambda', 'query_count', 'delta']
BUDGET_COLUMNS = KEY_COLUMNS + ['epsilon', 'alternative_epsilon', 'crude_epsilon', 'optimal_alpha']
COMPARISON_COLUMNS = [
    'dataset', 'source', 'mechanism', 'gamma', 'lambda', 'queries', 'delta',
    'ours_tight', 'ours_alternative', 'ours_crude', 'published_value', 'ratio', 'optimal_alpha',
]


def load_published_values(path: Union[str, Path, None] = None) -> pd.DataFrame:
    """Expand the published-values file into one row per tuple."""
    data = load_yaml(path or DEFAULT_PUBLISHED_VALUES)
    lambdas = data.get('lambdas', [])
    rows = []
    for group in data.get('groups', []):
        if len(group['values']) != len(lambdas):
            raise ValueError(f"group {group['dataset']}/{group['mechanism']} has {len(group['values'])} values for {len(lambdas)} lambdas")
        for lam, value in zip(lambdas, group['values']):
            rows.append({**{k: group[k] for k in ('dataset', 'source', 'mechanism', 'gamma', 'query_count', 'delta')},
                         'lambda': lam, 'published_value': value})
    for entry in data.get('single', []):
        rows.append({**{k: entry[k] for k in ('dataset', 'source', 'mechanism', 'gamma', 'lambda', 'query_count', 'delta')},
                     'published_value': entry['value']})
    frame = pd.DataFrame(rows, columns=['dataset', 'source'] + KEY_COLUMNS + ['published_value'])
    frame['gamma'] = frame['gamma'].astype(float)
    return frame


def accounting_row(mechanism: str, gamma: Optional[float], lambda_: float, query_count: int, delta: float,
                   max_order: int = DEFAULT_MAX_ORDER) -> dict:
    """Our budget for one tuple, computed straight from the accountant."""
    if mechanism == 'privgnn':
        params = PrivacyParams(gamma=gamma, lambda_=lambda_, num_queries=int(query_count), delta=delta)
        tight, crude = privgnn_budget(params, max_order, ConversionForm.SHIFTED)
        alternative, _ = privgnn_budget(params, max_order, ConversionForm.STANDARD)
        eps, alt, alpha = tight.epsilon, alternative.epsilon, tight.optimal_order
    else:
        guarantee = pate_budget(lambda_, int(query_count), delta, max_order)
        eps, alt, crude, alpha = guarantee.epsilon, float('nan'), float('nan'), guarantee.optimal_order
    return {
        'mechanism': mechanism, 'gamma': float('nan') if gamma is None else gamma, 'lambda': lambda_,
        'query_count': int(query_count), 'delta': delta, 'epsilon': eps,
        'alternative_epsilon': alt, 'crude_epsilon': crude, 'optimal_alpha': alpha,
    }


def published_accounting_rows(published_values: Optional[pd.DataFrame] = None, max_order: int = DEFAULT_MAX_ORDER) -> pd.DataFrame:
    """Budget rows for every distinct published tuple."""
    values = load_published_values() if published_values is None else published_values
    tuples = values[KEY_COLUMNS].drop_duplicates()
    rows = [
        accounting_row(t['mechanism'], None if pd.isna(t['gamma']) else float(t['gamma']), float(t['lambda']),
                       int(t['query_count']), float(t['delta']), max_order)
        for _, t in tuples.iterrows()
    ]
    return pd.DataFrame(rows, columns=BUDGET_COLUMNS)


def _key(row) -> Tuple:
    gamma = row['gamma']
    return (
        str(row['mechanism']),
        None if gamma is None or (isinstance(gamma, float) and math.isnan(gamma)) else round(float(gamma), 9),
        round(float(row['lambda']), 9),
        int(row['query_count']),
        float(f"{float(row['delta']):.9g}"),
    )


def compare_to_published(report_table: pd.DataFrame, published_values: Optional[pd.DataFrame] = None) -> Tuple[pd.DataFrame, List[Tuple]]:
    """Join our budgets to the published ones; returns the table and uncovered tuples."""
    values = load_published_values() if published_values is None else published_values
    missing_columns = [c for c in KEY_COLUMNS + ['epsilon'] if c not in report_table.columns]
    if missing_columns:
        raise ValueError(f"report table lacks columns {missing_columns}")

    ours = {}
    for _, row in report_table.iterrows():
        ours.setdefault(_key(row), row)

    rows, missing = [], []
    for _, ref in values.iterrows():
        key = _key(ref)
        match = ours.get(key)
        if match is None:
            missing.append(key)
        tight = float(match['epsilon']) if match is not None else float('nan')
        rows.append({
            'dataset': ref['dataset'],
            'source': ref['source'],
            'mechanism': ref['mechanism'],
            'gamma': ref['gamma'],
            'lambda': ref['lambda'],
            'queries': int(ref['query_count']),
            'delta': ref['delta'],
            'ours_tight': tight,
            'ours_alternative': float(match.get('alternative_epsilon', np.nan)) if match is not None else float('nan'),
            'ours_crude': float(match.get('crude_epsilon', np.nan)) if match is not None else float('nan'),
            'published_value': float(ref['published_value']),
            'ratio': tight / float(ref['published_value']),
            'optimal_alpha': match.get('optimal_alpha') if match is not None else None,
        })
    if missing:
        logger.warning(f"{len(missing)} published tuples are not covered by the report")
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS), missing
