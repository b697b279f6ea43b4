"""Unsupervised trainer for arc-probability heat maps consumed by the
cgroute pricing reducer. Talks to the solver exclusively through files:
exported training samples in, .hmap probability matrices out."""

from .emit import emit_heatmaps, probability_matrix, read_duals_source
from .features import Instance, Sample, guidance_weights, load_dataset, load_sample, node_features, pad_with_dummies
from .hmap_io import read_matrix, write_matrix
from .loss import heat_chain, heat_loss
from .model import HeatMapNet
from .train import TrainConfig, TrainResult, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "HeatMapNet",
    "Instance",
    "Sample",
    "TrainConfig",
    "TrainResult",
    "emit_heatmaps",
    "guidance_weights",
    "heat_chain",
    "heat_loss",
    "load_checkpoint",
    "load_dataset",
    "load_sample",
    "node_features",
    "pad_with_dummies",
    "probability_matrix",
    "read_duals_source",
    "read_matrix",
    "save_checkpoint",
    "train",
    "write_matrix",
]
