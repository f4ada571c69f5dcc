"""Plain-text model checkpoints.

Format::

    privgnn-checkpoint 1
    config {...json ModelConfig...}
    dims <input_dim> <num_classes>
    tensor <name> <rows> <cols>
    <rows lines of cols space-separated floats, repr precision>
    ...

Names are ``state_dict`` keys. 0-d and 1-D tensors are written as one row.
Buffers use the ``buffer`` keyword.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import torch

from schemas import ModelConfig
from .base_model import BaseClassifier
from .training import build_model

logger = logging.getLogger(__name__)

MAGIC = "privgnn-checkpoint"
FORMAT_VERSION = 1


def save_checkpoint(model: BaseClassifier, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        "config " + json.dumps(model.config.model_dump(mode='json'), sort_keys=True),
        f"dims {model.input_dim} {model.num_classes}",
    ]
    sections = (("tensor", dict(model.named_parameters())), ("buffer", dict(model.named_buffers())))
    for keyword, tensors in sections:
        for name in sorted(tensors):
            matrix = np.atleast_2d(tensors[name].detach().numpy())
            lines.append(f"{keyword} {name} {matrix.shape[0]} {matrix.shape[1]}")
            lines.extend(" ".join(repr(float(x)) for x in row) for row in matrix)
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Saved checkpoint with {model.parameter_count()} parameters to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> BaseClassifier:
    """Rebuild a model in eval mode from a checkpoint file."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].split() != [MAGIC, str(FORMAT_VERSION)]:
        raise ValueError(f"{path}: not a version {FORMAT_VERSION} checkpoint")
    if len(lines) < 3 or not lines[1].startswith("config "):
        raise ValueError(f"{path}:2: expected config line")
    config = ModelConfig(**json.loads(lines[1][len("config "):]))
    _, input_dim, num_classes = lines[2].split()
    model = build_model(config, int(input_dim), int(num_classes), np.random.default_rng(0))
    expected = model.state_dict()

    state = {}
    index = 3
    while index < len(lines):
        parts = lines[index].split()
        if len(parts) != 4 or parts[0] not in ("tensor", "buffer"):
            raise ValueError(f"{path}:{index + 1}: expected tensor header")
        keyword, name, rows = parts[0], parts[1], int(parts[2])
        if name not in expected:
            raise ValueError(f"{path}:{index + 1}: unknown {keyword} '{name}'")
        values = np.array([[float(x) for x in lines[index + 1 + r].split()] for r in range(rows)])
        reference = expected[name]
        state[name] = torch.as_tensor(values, dtype=reference.dtype).reshape(reference.shape)
        index += 1 + rows
    model.load_state_dict(state)
    model.eval()
    return model
