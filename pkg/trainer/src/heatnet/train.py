"""Training loop and checkpointing."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .features import Sample
from .loss import heat_loss
from .model import HeatMapNet


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 32
    lr: float = 1e-3
    arc_weight: float = 1.0
    diagonal_weight: float = 1.0
    norm_weight: float = 1.0
    column_norm: bool = False
    width: int = 128
    depth: int = 3
    heads: int = 8
    seed: int = 0

    def __post_init__(self):
        if min(self.arc_weight, self.diagonal_weight, self.norm_weight) <= 0:
            raise ValueError("loss weights must be positive")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")


@dataclass
class TrainResult:
    model: HeatMapNet
    epoch_losses: list = field(default_factory=list)  # mean loss per epoch

    @property
    def first_epoch_loss(self) -> float:
        return self.epoch_losses[0]

    @property
    def final_epoch_loss(self) -> float:
        return self.epoch_losses[-1]


def _batches(count: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(count)
    for start in range(0, count, batch_size):
        yield order[start : start + batch_size]


def train(samples: list[Sample], cfg: TrainConfig, log=None) -> TrainResult:
    """Optimize the unsupervised objective over a fixed-size dataset.

    Raises TrainingDiverged with the failing epoch/batch if the loss
    stops being finite."""
    if not samples:
        raise ValueError("empty dataset")
    if cfg.batch_size > len(samples):
        raise ValueError("batch_size exceeds the dataset size")
    n_total = samples[0].n_total
    torch.manual_seed(cfg.seed)
    model = HeatMapNet(n_total, width=cfg.width, depth=cfg.depth, heads=cfg.heads)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    nodes = torch.tensor(np.stack([s.nodes for s in samples]), dtype=torch.float32)
    qs = torch.tensor(np.stack([s.q for s in samples]), dtype=torch.float32)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((cfg.seed, 1))))
    result = TrainResult(model=model)
    for epoch in range(cfg.epochs):
        totals = 0.0
        seen = 0
        for batch_no, idx in enumerate(_batches(len(samples), cfg.batch_size, rng)):
            batch_idx = torch.from_numpy(np.ascontiguousarray(idx))
            T = model(nodes[batch_idx], qs[batch_idx])
            losses = heat_loss(
                T,
                qs[batch_idx],
                arc_weight=cfg.arc_weight,
                diagonal_weight=cfg.diagonal_weight,
                norm_weight=cfg.norm_weight,
                column_norm=cfg.column_norm,
            )
            loss = losses.mean()
            if not torch.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch} batch {batch_no}: "
                    f"loss={loss.item()!r}, batch indices {idx.tolist()}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            totals += float(loss.item()) * len(idx)
            seen += len(idx)
        result.epoch_losses.append(totals / seen)
        if log is not None:
            log(epoch, result.epoch_losses[-1])
    return result


def save_checkpoint(path, model: HeatMapNet, cfg: TrainConfig) -> Path:
    path = Path(path)
    torch.save(
        {
            "state_dict": model.state_dict(),
            "n_total": model.n_total,
            "config": dataclasses.asdict(cfg),
        },
        path,
    )
    return path


def load_checkpoint(path) -> tuple[HeatMapNet, TrainConfig]:
    payload = torch.load(Path(path), weights_only=True)
    cfg = TrainConfig(**payload["config"])
    model = HeatMapNet(payload["n_total"], width=cfg.width, depth=cfg.depth, heads=cfg.heads)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, cfg
