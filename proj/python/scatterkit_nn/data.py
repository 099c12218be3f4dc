"""Reader for the generated dataset directory."""

import json
from pathlib import Path

import numpy as np

from .formats import read_matrix


def load_manifest(root):
    with open(Path(root) / "manifest.json") as f:
        return json.load(f)


def load_pairs(root, indices):
    root = Path(root)
    inputs, targets = [], []
    for i in indices:
        x = read_matrix(root / "pairs" / f"{i:05d}.input.real1")
        y = read_matrix(root / "pairs" / f"{i:05d}.target.real1")
        if x.shape != (80, 80) or y.shape != (80, 80):
            raise ValueError(f"sample {i}: expected 80x80 pairs, got {x.shape} and {y.shape}")
        inputs.append(x)
        targets.append(y)
    return np.stack(inputs).astype(np.float32), np.stack(targets).astype(np.float32)


def load_split(root):
    m = load_manifest(root)
    return load_pairs(root, m["split"]["train"]), load_pairs(root, m["split"]["val"])
