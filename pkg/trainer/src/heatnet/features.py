"""Model inputs from solver-exported files.

Node features per node: scaled (x, y, demand, service, window open,
window close, dual). Arc features: the guidance-weight matrix q, read
from q.bin for training data or recomputed from (instance, duals) when
emitting heat maps for a live run. All time-like quantities are divided
by the depot horizon and demands by the vehicle capacity, mirroring the
solver's conventions; infeasible arcs carry the fixed penalty weight 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hmap_io import read_matrix

INFEASIBLE_WEIGHT = 2.0
NODE_FEATURES = 7


@dataclass(frozen=True)
class Instance:
    """Just enough of the solver's instance JSON to build features."""

    coords: np.ndarray
    demand: np.ndarray
    service: np.ndarray
    tw: np.ndarray
    capacity: float

    @property
    def n(self) -> int:
        return len(self.demand) - 1

    @property
    def horizon(self) -> float:
        return float(self.tw[0, 1])

    @classmethod
    def from_json(cls, path) -> "Instance":
        data = json.loads(Path(path).read_text())
        nodes = data["nodes"]
        if len(nodes) != data["n"] + 1:
            raise ValueError(f"{path}: node count does not match n")
        return cls(
            coords=np.array([[nd["x"], nd["y"]] for nd in nodes], dtype=float),
            demand=np.array([nd["demand"] for nd in nodes], dtype=float),
            service=np.array([nd["service"] for nd in nodes], dtype=float),
            tw=np.array([nd["tw"] for nd in nodes], dtype=float),
            capacity=float(data["capacity"]),
        )

    def travel(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))


def node_features(inst: Instance, duals, coord_divisor: float = 1.0, dual_divisor: float | None = None) -> np.ndarray:
    """(n+1, 7) feature rows; dual_divisor defaults to the depot horizon."""
    duals = np.asarray(duals, dtype=float)
    if duals.shape != (inst.n + 1,):
        raise ValueError(f"duals length {duals.shape} does not match n={inst.n}")
    b0 = inst.horizon
    dd = b0 if dual_divisor is None else dual_divisor
    return np.column_stack(
        [
            inst.coords / coord_divisor,
            inst.demand / inst.capacity,
            inst.service / b0,
            inst.tw / b0,
            duals / dd,
        ]
    )


def guidance_weights(inst: Instance, duals) -> np.ndarray:
    """Recompute the q matrix the solver exports: scaled arc lengths
    p = t - d rescaled into [-1, 1] over feasible arcs, discounted or
    inflated by the minimum traversal time plus the head demand."""
    duals = np.asarray(duals, dtype=float)
    b0 = inst.horizon
    t = inst.travel() / b0
    a = inst.tw[:, 0] / b0
    b = inst.tw[:, 1] / b0
    s = inst.service / b0
    dem = inst.demand / inst.capacity
    d = duals / b0

    p = t - d[None, :]
    feasible = (a[:, None] + s[:, None] + t) <= b[None, :] + 1e-12
    np.fill_diagonal(feasible, False)
    if feasible.any():
        pf = p[feasible]
        divisor = max(abs(pf.min()), abs(pf.max()))
    else:
        divisor = 0.0
    p = p / (divisor if divisor > 0 else 1.0)

    u = np.maximum(a[None, :], a[:, None] + s[:, None] + t) - a[:, None]
    u = np.maximum(u, 0.0)
    growth = u + dem[None, :]
    q = np.where(p < 0, p * np.exp(-growth), p * np.exp(growth))
    return np.where(feasible, q, INFEASIBLE_WEIGHT)


@dataclass(frozen=True)
class Sample:
    """One training example: node features plus the arc-weight matrix."""

    nodes: np.ndarray
    q: np.ndarray

    @property
    def n_total(self) -> int:
        return self.nodes.shape[0]


def load_sample(sample_dir) -> Sample:
    """Read one exported sample directory (instance.json, duals.json, q.bin)."""
    sample_dir = Path(sample_dir)
    inst = Instance.from_json(sample_dir / "instance.json")
    duals = np.array(json.loads((sample_dir / "duals.json").read_text()), dtype=float)
    q = read_matrix(sample_dir / "q.bin")
    if q.shape[0] != inst.n + 1:
        raise ValueError(f"{sample_dir}: q matrix size does not match the instance")
    return Sample(nodes=node_features(inst, duals), q=q)


def load_dataset(root) -> list[Sample]:
    root = Path(root)
    dirs = sorted(p for p in root.iterdir() if p.is_dir() and p.name.startswith("sample_"))
    if not dirs:
        raise ValueError(f"no sample_* directories under {root}")
    samples = [load_sample(p) for p in dirs]
    sizes = {s.n_total for s in samples}
    if len(sizes) != 1:
        raise ValueError(f"mixed instance sizes in dataset: {sorted(sizes)}")
    return samples


def pad_with_dummies(nodes: np.ndarray, q: np.ndarray, target_total: int):
    """Grow an instance to the model size with unreachable filler customers.

    Dummy nodes get all-zero features and the infeasible penalty on every
    incident arc; returns (nodes, q, kept_index).
    """
    n_total = nodes.shape[0]
    if target_total < n_total:
        raise ValueError(f"instance with {n_total} nodes does not fit a model of size {target_total}")
    if target_total == n_total:
        return nodes, q, np.arange(n_total)
    padded_nodes = np.zeros((target_total, NODE_FEATURES))
    padded_nodes[:n_total] = nodes
    padded_q = np.full((target_total, target_total), INFEASIBLE_WEIGHT)
    padded_q[:n_total, :n_total] = q
    return padded_nodes, padded_q, np.arange(n_total)
