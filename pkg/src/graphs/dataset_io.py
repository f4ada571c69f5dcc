"""Reading and writing graph datasets as plain CSV/JSON directories.

Layout::

    edges.csv     u,v per line (undirected, each edge once)
    features.csv  one row of d floats per node, row i = node i
    labels.csv    node_id,label
    split.json    {"private_nodes": [...], "public_train_nodes": [...], "public_test_nodes": [...]}

Ids live in one space shared by both graphs. Edges between the private and
public parts are rejected.
"""

import json
import re
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .graph_core import Graph, GraphRole, NodeSet

logger = logging.getLogger(__name__)

SPLIT_KEYS = ('private_nodes', 'public_train_nodes', 'public_test_nodes')


class DatasetFormatError(ValueError):
    """A dataset file is malformed; names the file and 1-based line."""

    def __init__(self, path: Union[str, Path], line: Optional[int], message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


@dataclass(frozen=True)
class PublicSplit:
    """Public nodes used as queries/student training vs held-out evaluation."""
    train: NodeSet
    test: NodeSet


@dataclass(frozen=True)
class GraphDataset:
    private: Graph
    public: Graph
    split: PublicSplit
    name: str = "dataset"

    @property
    def num_classes(self) -> int:
        return int(self.private.num_classes)


def _read_table(path: Path, columns: Optional[List[str]] = None) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=columns or [], dtype=object)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise DatasetFormatError(path, int(match.group(1)) if match else None, f"could not parse CSV: {e}")
    except FileNotFoundError:
        raise DatasetFormatError(path, None, "file not found")
    if columns is not None:
        if frame.shape[1] != len(columns):
            raise DatasetFormatError(path, 1, f"expected {len(columns)} columns, found {frame.shape[1]}")
        frame.columns = columns
    return frame


def _int_column(frame: pd.DataFrame, column: str, path: Path, upper: Optional[int] = None) -> np.ndarray:
    values = pd.to_numeric(frame[column].str.strip(), errors='coerce')
    bad = values.isna() | (values % 1 != 0) | (values < 0)
    if upper is not None:
        bad |= values >= upper
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise DatasetFormatError(path, row + 1, f"invalid {column} value {frame[column].iloc[row]!r}")
    return values.to_numpy(dtype=np.int64)


def _read_features(path: Path) -> np.ndarray:
    frame = _read_table(path)
    if frame.empty:
        raise DatasetFormatError(path, None, "no feature rows")
    numeric = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors='coerce'))
    matrix = numeric.to_numpy(dtype=np.float64)
    bad_rows = ~np.isfinite(matrix).all(axis=1)
    if bad_rows.any():
        row = int(np.flatnonzero(bad_rows)[0])
        raise DatasetFormatError(path, row + 1, "feature row is ragged or not numeric")
    return matrix


def _read_split(path: Path, num_nodes: int) -> Dict[str, np.ndarray]:
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise DatasetFormatError(path, None, "file not found")
    except json.JSONDecodeError as e:
        raise DatasetFormatError(path, e.lineno, f"invalid JSON: {e.msg}")
    split = {}
    for key in SPLIT_KEYS:
        if key not in raw:
            raise DatasetFormatError(path, None, f"missing '{key}' node list")
        try:
            split[key] = NodeSet.of(raw[key], num_nodes=num_nodes).ids
        except (TypeError, ValueError) as e:
            raise DatasetFormatError(path, None, f"bad '{key}' node list: {e}")
    seen = np.zeros(num_nodes, dtype=np.int64)
    for ids in split.values():
        seen[ids] += 1
    if (seen > 1).any():
        raise DatasetFormatError(path, None, f"node {int(np.flatnonzero(seen > 1)[0])} is in more than one split")
    unused = int((seen == 0).sum())
    if unused:
        logger.warning(f"{unused} nodes in {path.parent} are in no split and will be ignored")
    return split


def load_dataset(directory: Union[str, Path], name: Optional[str] = None) -> GraphDataset:
    """Load a dataset directory into private and public graphs."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetFormatError(directory, None, "dataset directory not found")

    features = _read_features(directory / 'features.csv')
    num_nodes = features.shape[0]
    split = _read_split(directory / 'split.json', num_nodes)

    labels_path = directory / 'labels.csv'
    label_frame = _read_table(labels_path, ['node_id', 'label'])
    node_ids = _int_column(label_frame, 'node_id', labels_path, upper=num_nodes)
    label_values = _int_column(label_frame, 'label', labels_path)
    labels = np.full(num_nodes, -1, dtype=np.int64)
    labels[node_ids] = label_values

    edges_path = directory / 'edges.csv'
    edge_frame = _read_table(edges_path, ['u', 'v'])
    u = _int_column(edge_frame, 'u', edges_path, upper=num_nodes)
    v = _int_column(edge_frame, 'v', edges_path, upper=num_nodes)

    part = np.full(num_nodes, -1, dtype=np.int64)
    part[split['private_nodes']] = 0
    part[split['public_train_nodes']] = 1
    part[split['public_test_nodes']] = 1
    crossing = (part[u] >= 0) & (part[v] >= 0) & (part[u] != part[v])
    if crossing.any():
        row = int(np.flatnonzero(crossing)[0])
        raise DatasetFormatError(edges_path, row + 1, f"edge ({u[row]}, {v[row]}) joins the private and public graphs")

    public_ids = np.union1d(split['public_train_nodes'], split['public_test_nodes'])
    for key, ids in (('private', split['private_nodes']), ('public', public_ids)):
        missing = ids[labels[ids] < 0]
        if missing.size:
            raise DatasetFormatError(labels_path, None, f"{key} node {int(missing[0])} has no label")
    num_classes = int(labels[labels >= 0].max()) + 1 if (labels >= 0).any() else 0

    name = name or directory.name
    private = _part_graph(split['private_nodes'], u, v, features, labels, num_classes, GraphRole.PRIVATE, f"{name}/private")
    public = _part_graph(public_ids, u, v, features, labels, num_classes, GraphRole.PUBLIC, f"{name}/public")
    local = (
        np.searchsorted(public_ids, split['public_train_nodes']),
        np.searchsorted(public_ids, split['public_test_nodes']),
    )
    dataset = GraphDataset(
        private=private,
        public=public,
        split=PublicSplit(train=NodeSet.of(local[0]), test=NodeSet.of(local[1])),
        name=name,
    )
    logger.info(
        f"Loaded {name}: private {private.num_nodes} nodes/{private.num_edges} edges, "
        f"public {public.num_nodes} nodes/{public.num_edges} edges, {num_classes} classes"
    )
    return dataset


def _part_graph(ids, u, v, features, labels, num_classes, role, name) -> Graph:
    local = np.full(features.shape[0], -1, dtype=np.int64)
    local[ids] = np.arange(ids.size)
    keep = (local[u] >= 0) & (local[v] >= 0)
    edges = np.stack([local[u[keep]], local[v[keep]]], axis=1)
    return Graph.from_edges(
        ids.size, edges, features[ids], labels[ids],
        num_classes=num_classes, role=role, name=name, parent_ids=ids,
    )


def save_dataset(dataset: GraphDataset, directory: Union[str, Path]) -> Dict[str, Path]:
    """Write a dataset; private nodes take ids 0..P−1, public nodes follow."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    private, public = dataset.private, dataset.public
    offset = private.num_nodes

    edge_blocks = []
    for graph, shift in ((private, 0), (public, offset)):
        coo = graph.adjacency.tocoo()
        keep = coo.row < coo.col
        edge_blocks.append(np.stack([coo.row[keep] + shift, coo.col[keep] + shift], axis=1))
    edges = np.concatenate(edge_blocks) if edge_blocks else np.zeros((0, 2), dtype=np.int64)

    features = np.vstack([private.features, public.features])
    labels = np.concatenate([private.labels, public.labels])
    paths = {
        'edges': directory / 'edges.csv',
        'features': directory / 'features.csv',
        'labels': directory / 'labels.csv',
        'split': directory / 'split.json',
    }
    pd.DataFrame(edges).to_csv(paths['edges'], header=False, index=False, lineterminator='\n')
    pd.DataFrame(features).to_csv(
        paths['features'], header=False, index=False, float_format='%.17g', lineterminator='\n'
    )
    pd.DataFrame({'node_id': np.arange(labels.size), 'label': labels}).to_csv(
        paths['labels'], header=False, index=False, lineterminator='\n'
    )
    split = {
        'private_nodes': list(range(offset)),
        'public_train_nodes': (dataset.split.train.ids + offset).tolist(),
        'public_test_nodes': (dataset.split.test.ids + offset).tolist(),
    }
    paths['split'].write_text(json.dumps(split, indent=1))
    logger.info(f"Saved dataset '{dataset.name}' to {directory}")
    return paths
