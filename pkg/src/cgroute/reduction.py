"""Arc-reduction strategies applied to a pricing graph before pricing:
keep-everything, the smallest-p rule (BE2), and the heat-map mask."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .heatmap import HeatMapAdjusted
from .instance import PricingInstance

STRATEGY_NONE = "none"
STRATEGY_BE2 = "be2"
STRATEGY_ULGR = "ulgr"


@dataclass(frozen=True)
class ReducedGraph:
    """Boolean arc mask over the pricing graph (diagonal always off)."""

    keep: np.ndarray
    strategy: str

    def __post_init__(self):
        keep = np.asarray(self.keep, dtype=bool).copy()
        np.fill_diagonal(keep, False)
        keep.flags.writeable = False
        object.__setattr__(self, "keep", keep)

    @property
    def retained(self) -> int:
        return int(self.keep.sum())


def no_reduction(pricing: PricingInstance) -> ReducedGraph:
    """Keep every off-diagonal arc."""
    N = pricing.n + 1
    return ReducedGraph(keep=~np.eye(N, dtype=bool), strategy=STRATEGY_NONE)


def be2(pricing: PricingInstance, beta: float = 0.2) -> ReducedGraph:
    """Keep the ceil(beta * |A|) arcs with the smallest p value.

    All off-diagonal arcs compete, infeasible ones included — the rule
    deliberately ignores feasibility. Ties break toward the
    lexicographically smaller (i, j).
    """
    if not 0 < beta <= 1:
        raise ValueError("beta must be in (0, 1]")
    N = pricing.n + 1
    off_diag = ~np.eye(N, dtype=bool)
    flat_idx = np.flatnonzero(off_diag.ravel())  # row-major: lexicographic (i, j)
    values = pricing.p.ravel()[flat_idx]
    # guard the ceiling against float noise (0.2 * 40200 = 8040.0000...01)
    count = min(flat_idx.size, max(1, math.ceil(beta * flat_idx.size - 1e-9)))
    chosen = flat_idx[np.argsort(values, kind="stable")[:count]]
    keep = np.zeros(N * N, dtype=bool)
    keep[chosen] = True
    return ReducedGraph(keep=keep.reshape(N, N), strategy=STRATEGY_BE2)


def ulgr_mask(adjusted: HeatMapAdjusted) -> ReducedGraph:
    """Arc mask from the adjusted heat map: the top-M retained support
    plus every depot arc, whatever its weight."""
    keep = adjusted.kept.copy()
    keep[0, 1:] = True
    keep[1:, 0] = True
    return ReducedGraph(keep=keep, strategy=STRATEGY_ULGR)
