"""Heat-map emission for live solver runs.

For every dual vector of a run, build the model inputs (padding with
unreachable filler customers when the instance is smaller than the
model), run the forward pass, drop the filler rows and columns from the
pre-softmax scores, re-softmax the surviving rows, and write the matrix
as an iteration-indexed .hmap file the solver can load."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .features import Instance, guidance_weights, node_features, pad_with_dummies
from .hmap_io import write_matrix
from .model import HeatMapNet


def probability_matrix(
    model: HeatMapNet,
    inst: Instance,
    duals,
    coord_divisor: float = 1.0,
    dual_divisor: float | None = None,
) -> np.ndarray:
    """One row-stochastic (n+1, n+1) matrix for one dual vector."""
    duals = np.asarray(duals, dtype=float)
    nodes = node_features(inst, duals, coord_divisor=coord_divisor, dual_divisor=dual_divisor)
    q = guidance_weights(inst, duals)
    nodes, q, kept = pad_with_dummies(nodes, q, model.n_total)
    with torch.no_grad():
        scores = model.scores(torch.tensor(nodes, dtype=torch.float32), torch.tensor(q, dtype=torch.float32))
        trimmed = scores[kept][:, kept]
        T = torch.softmax(trimmed, dim=-1)
    return T.numpy().astype(float)


def read_duals_source(path) -> list[np.ndarray]:
    """Per-iteration dual vectors: JSONL (one array per line) or a single
    JSON array file."""
    text = Path(path).read_text().strip()
    if not text:
        raise ValueError(f"{path}: empty duals source")
    try:
        loaded = json.loads(text)
        rows = loaded if isinstance(loaded[0], list) else [loaded]
    except json.JSONDecodeError:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    return [np.asarray(row, dtype=float) for row in rows]


def emit_heatmaps(
    model: HeatMapNet,
    inst: Instance,
    duals_rows,
    out_dir,
    coord_divisor: float = 1.0,
    dual_divisor: float | None = None,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for k, duals in enumerate(duals_rows):
        T = probability_matrix(model, inst, duals, coord_divisor=coord_divisor, dual_divisor=dual_divisor)
        written.append(write_matrix(out_dir / f"iter_{k:06d}.hmap", T))
    return written
