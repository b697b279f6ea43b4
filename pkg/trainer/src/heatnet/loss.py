"""The unsupervised objective: weight retained connectivity by arc
economics, punish self-successions, and pull the probability mass toward
a normalized assignment."""

from __future__ import annotations

import torch


def heat_chain(T: torch.Tensor) -> torch.Tensor:
    """Chain consecutive columns of T cyclically: H = sum_t h_t h_{t+1}^T
    with the last column wrapping back to the first. Works batched."""
    shifted = torch.roll(T, shifts=-1, dims=-1)
    return T @ shifted.transpose(-2, -1)


def heat_loss(
    T: torch.Tensor,
    q: torch.Tensor,
    arc_weight: float = 1.0,
    diagonal_weight: float = 1.0,
    norm_weight: float = 1.0,
    column_norm: bool = False,
) -> torch.Tensor:
    """Scalar (or per-batch) objective.

    arc_weight scales sum_ij H_ij q_ij; diagonal_weight scales the trace
    of H; norm_weight scales sum_i (1 - sum_j T_ij)^2. `column_norm`
    switches the last term to column sums (incoming-arc normalization),
    the reading suggested by the prose around the formula."""
    if T.shape != q.shape:
        raise ValueError(f"shape mismatch: T {tuple(T.shape)} vs q {tuple(q.shape)}")
    H = heat_chain(T)
    term_arc = (H * q).sum(dim=(-2, -1))
    term_diag = H.diagonal(dim1=-2, dim2=-1).sum(dim=-1)
    sums = T.sum(dim=-2) if column_norm else T.sum(dim=-1)
    term_norm = ((1.0 - sums) ** 2).sum(dim=-1)
    return arc_weight * term_arc + diagonal_weight * term_diag + norm_weight * term_norm
