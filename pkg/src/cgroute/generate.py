"""Random C-VRPTW instances and representative dual vectors.

Every sampled field draws from its own Philox stream keyed by
(seed, field id), so adding a new field never perturbs the existing ones
and the fixtures stay reproducible across platforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .heatmap import save_matrix
from .instance import VrptwInstance, build_pricing

# Stream ids, one per sampled field. Append only; never renumber.
_STREAMS = {
    "coords": 0,
    "demand": 1,
    "service": 2,
    "tw_start": 3,
    "tw_len": 4,
    "theta": 5,
    "duals": 6,
    "export": 7,
}


def field_rng(seed: int, name: str) -> np.random.Generator:
    """Philox generator for one named field of one seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed), _STREAMS[name]))))


def default_capacity(n: int) -> int:
    """Vehicle capacity used for each instance-size class."""
    return 80 if n >= 1000 else 50


@dataclass(frozen=True)
class GenConfig:
    n: int
    capacity: float = 50.0
    seed: int = 0
    depot_b0: float = 18.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.capacity < 10:
            raise ValueError("capacity must cover the maximum demand of 10")

    @classmethod
    def for_size(cls, n: int, seed: int = 0) -> "GenConfig":
        return cls(n=n, capacity=default_capacity(n), seed=seed)


def generate_instance(cfg: GenConfig) -> VrptwInstance:
    """Sample one instance: unit-square coords, integer demands in [1,10],
    service in [0.2,0.5], windows of length 1 or 2 opening at an integer
    in [0,16], depot horizon [0,18]."""
    n = cfg.n
    coords = field_rng(cfg.seed, "coords").random((n + 1, 2))
    demand = np.zeros(n + 1)
    demand[1:] = field_rng(cfg.seed, "demand").integers(1, 11, size=n)
    service = np.zeros(n + 1)
    service[1:] = field_rng(cfg.seed, "service").uniform(0.2, 0.5, size=n)
    a = np.zeros(n + 1)
    a[1:] = field_rng(cfg.seed, "tw_start").integers(0, 17, size=n)
    length = np.zeros(n + 1)
    length[0] = cfg.depot_b0
    length[1:] = field_rng(cfg.seed, "tw_len").integers(1, 3, size=n)
    tw = np.stack([a, a + length], axis=1)
    return VrptwInstance(coords=coords, demand=demand, service=service, tw=tw, capacity=cfg.capacity)


def sample_duals(instance: VrptwInstance, seed: int) -> np.ndarray:
    """Representative dual vector: one theta ~ U[0.2, 1.1] per call, then
    d_i ~ U[0, theta * max_j t_ji] per customer; the depot gets 0."""
    n = instance.n
    theta = float(field_rng(seed, "theta").uniform(0.2, 1.1))
    t_max = instance.travel.max(axis=0)
    duals = np.zeros(n + 1)
    duals[1:] = field_rng(seed, "duals").uniform(0.0, 1.0, size=n) * (theta * t_max[1:])
    return duals


def _sample_seeds(base_seed: int, index: int) -> tuple[int, int]:
    state = np.random.SeedSequence((int(base_seed), int(_STREAMS["export"]), int(index))).generate_state(2, dtype=np.uint64)
    return int(state[0]), int(state[1])


def export_training_set(cfg: GenConfig, count: int, out_dir) -> list[Path]:
    """Write `count` training samples under out_dir.

    Each sample_{k} directory holds instance.json, duals.json and q.bin
    (the guidance-weight matrix in the shared binary matrix format).
    Re-running with the same cfg produces byte-identical files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for k in range(count):
        inst_seed, dual_seed = _sample_seeds(cfg.seed, k)
        inst = generate_instance(replace(cfg, seed=inst_seed))
        duals = sample_duals(inst, dual_seed)
        pricing = build_pricing(inst, duals)
        sample = out_dir / f"sample_{k:05d}"
        sample.mkdir(parents=True, exist_ok=True)
        inst.save(sample / "instance.json")
        (sample / "duals.json").write_text(json.dumps([float(d) for d in duals]) + "\n")
        save_matrix(sample / "q.bin", pricing.q)
        written.append(sample)
    return written
