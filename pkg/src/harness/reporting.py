"""Writing report records and CSV tables."""

import logging
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from schemas import ExperimentReport

logger = logging.getLogger(__name__)


def reports_table(reports: Iterable[ExperimentReport], include_timing: bool = True) -> pd.DataFrame:
    """One row per report; columns in first-seen order."""
    rows = [r.to_row(include_timing=include_timing) for r in reports]
    columns: List[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    return pd.DataFrame(rows, columns=columns)


def write_table(table: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format='%.10g', lineterminator='\n')
    logger.info(f"Wrote {len(table)} rows to {path}")
    return path


def write_record(report: ExperimentReport, path: Union[str, Path]) -> Path:
    """Key/value record next to the CSV row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_record())
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)
