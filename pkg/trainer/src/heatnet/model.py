"""Attention encoder producing row-stochastic arc probability matrices.

Node embeddings pass through self-attention layers whose logits carry an
additive per-head bias from the arc-weight matrix, so the network sees
both node geometry and arc economics. No positional encodings: the
architecture is permutation-equivariant by construction. The output head
scores every ordered node pair and row-softmaxes into T.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from .features import NODE_FEATURES


class ArcBiasedAttention(nn.Module):
    def __init__(self, width: int, heads: int):
        super().__init__()
        if width % heads:
            raise ValueError("width must be divisible by heads")
        self.heads = heads
        self.head_dim = width // heads
        self.qkv = nn.Linear(width, 3 * width)
        self.arc_bias = nn.Linear(1, heads)
        self.out = nn.Linear(width, width)

    def forward(self, x: torch.Tensor, arc: torch.Tensor) -> torch.Tensor:
        B, N, _ = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)

        def split(t):
            return t.view(B, N, self.heads, self.head_dim).transpose(1, 2)

        q, k, v = split(q), split(k), split(v)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        bias = self.arc_bias(arc.unsqueeze(-1)).permute(0, 3, 1, 2)
        attn = torch.softmax(scores + bias, dim=-1)
        merged = (attn @ v).transpose(1, 2).reshape(B, N, -1)
        return self.out(merged)


class EncoderLayer(nn.Module):
    def __init__(self, width: int, heads: int):
        super().__init__()
        self.attention = ArcBiasedAttention(width, heads)
        self.norm1 = nn.LayerNorm(width)
        # GELU keeps the whole network smooth, which the gradient checks rely on
        self.ff = nn.Sequential(nn.Linear(width, 2 * width), nn.GELU(), nn.Linear(2 * width, width))
        self.norm2 = nn.LayerNorm(width)

    def forward(self, x, arc):
        x = self.norm1(x + self.attention(x, arc))
        return self.norm2(x + self.ff(x))


class HeatMapNet(nn.Module):
    """Fixed-size network: one model per instance-size class."""

    def __init__(self, n_total: int, width: int = 128, depth: int = 3, heads: int = 8):
        super().__init__()
        self.n_total = n_total
        self.width = width
        self.depth = depth
        self.heads = heads
        self.embed = nn.Linear(NODE_FEATURES, width)
        self.layers = nn.ModuleList(EncoderLayer(width, heads) for _ in range(depth))
        self.src = nn.Linear(width, width)
        self.dst = nn.Linear(width, width)
        self.arc_out = nn.Linear(1, 1, bias=False)

    def _check(self, nodes, arc):
        if nodes.shape[-2] != self.n_total or arc.shape[-1] != self.n_total:
            raise ValueError(
                f"model is sized for {self.n_total} nodes, got features {tuple(nodes.shape)} / arcs {tuple(arc.shape)}"
            )
        if nodes.shape[-1] != NODE_FEATURES:
            raise ValueError(f"expected {NODE_FEATURES} node features, got {nodes.shape[-1]}")

    def scores(self, nodes: torch.Tensor, arc: torch.Tensor) -> torch.Tensor:
        """Pre-softmax pairwise logits (batch, N, N)."""
        squeeze = nodes.dim() == 2
        if squeeze:
            nodes, arc = nodes.unsqueeze(0), arc.unsqueeze(0)
        self._check(nodes, arc)
        x = self.embed(nodes)
        for layer in self.layers:
            x = layer(x, arc)
        logits = self.src(x) @ self.dst(x).transpose(-2, -1) / math.sqrt(self.width)
        logits = logits + self.arc_out(arc.unsqueeze(-1)).squeeze(-1)
        return logits.squeeze(0) if squeeze else logits

    def forward(self, nodes: torch.Tensor, arc: torch.Tensor) -> torch.Tensor:
        """Row-stochastic probability matrix T."""
        return torch.softmax(self.scores(nodes, arc), dim=-1)
