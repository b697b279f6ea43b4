"""Connectivity heat maps: rank-1 chaining of a probability matrix,
top-M adjustment with forced depot arcs, symmetrization, row sampling,
and the binary matrix file format shared with the trainer."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import PricingInstance

MATRIX_MAGIC = b"HMAP"
MATRIX_VERSION = 1

# Row sums farther than this from 1 are rejected by load_T; anything
# closer is silently renormalized.
ROW_SUM_REJECT = 1e-2


class HeatMapError(ValueError):
    """Bad probability matrix or matrix file."""


@dataclass(frozen=True)
class ProbMatrix:
    """Row-stochastic arc probability matrix over nodes 0..n (0 = depot)."""

    probs: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.probs, dtype=float)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise HeatMapError("probability matrix must be square")
        if np.any(~np.isfinite(T)):
            raise HeatMapError("probability matrix has non-finite entries")
        if np.any(T < 0):
            raise HeatMapError("probability matrix has negative entries")
        sums = T.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-6):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise HeatMapError(f"row {bad} sums to {sums[bad]:.8f}, not 1")
        T = T.copy()
        T.flags.writeable = False
        object.__setattr__(self, "probs", T)

    @property
    def n_total(self) -> int:
        return self.probs.shape[0]


def heat_from_T(T) -> np.ndarray:
    """Chain consecutive columns of T into an arc-connectivity map.

    H = sum_t h_t h_{t+1}^T over all columns taken cyclically (the last
    column pairs with the first), so H[i, j] accumulates the probability
    of i being visited at some position and j at the next one.
    """
    T = T.probs if isinstance(T, ProbMatrix) else np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise HeatMapError("expected a square matrix")
    shifted = np.roll(T, -1, axis=1)
    return T @ shifted.T


@dataclass(frozen=True)
class HeatMapAdjusted:
    """Top-M adjusted heat map: retained support plus a symmetric sampler.

    kept:     boolean support of the top-M retention with the depot row
              and column forced in (diagonal excluded); this is what the
              pricing graph keeps.
    hprime:   symmetrized retained map, rows renormalized to sum to 1.
    row_cum:  per-row cumulative distributions for sampling.
    zero_row: rows with no mass; sampling them is an error.
    """

    M: int
    kept: np.ndarray
    hprime: np.ndarray
    row_cum: np.ndarray
    zero_row: np.ndarray

    @property
    def n_total(self) -> int:
        return self.hprime.shape[0]

    @property
    def support(self) -> np.ndarray:
        """Support of the symmetric sampler."""
        return self.hprime > 0

    def sample(self, row: int, rng: np.random.Generator) -> int:
        """Draw a neighbor of `row` from the normalized heat map row."""
        if self.zero_row[row]:
            raise HeatMapError(f"row {row} of the adjusted heat map has no mass")
        return int(np.searchsorted(self.row_cum[row], rng.random(), side="right"))


def adjust(H, M: int = 10) -> HeatMapAdjusted:
    """Retain the top M off-diagonal entries of each row (depot row kept
    whole), force the depot column in, symmetrize, and renormalize rows.

    Self-loops are not arcs, so diagonal entries never compete for the M
    slots; with M = n every arc of an all-positive map survives.
    Force-retained depot entries that carried no weight get the row's
    maximum retained value so the sampler can actually reach them.
    """
    H = np.asarray(H, dtype=float)
    if np.any(H < 0):
        raise HeatMapError("heat map entries must be nonnegative")
    N = H.shape[0]
    hbar = np.zeros_like(H)
    hbar[0, :] = H[0, :]
    hbar[0, 0] = 0.0
    if N > 1:
        m = min(int(M), N)
        scores = H.copy()
        np.fill_diagonal(scores, -np.inf)
        # argsort of -scores is stable, so equal values keep source order:
        # ties break toward the lower column index.
        order = np.argsort(-scores[1:, :], axis=1, kind="stable")[:, :m]
        row_idx = np.arange(N - 1)[:, None]
        valid = np.isfinite(scores[1:, :][row_idx, order]).ravel()
        rows = np.repeat(np.arange(1, N), m)[valid]
        cols = order.ravel()[valid]
        hbar[rows, cols] = H[rows, cols]

    row_max = hbar.max(axis=1)
    force = np.ones(N, dtype=bool)
    force[0] = False  # (0, 0) is a self-loop, never forced
    missing = force & (hbar[:, 0] <= 0)
    hbar[missing, 0] = row_max[missing]
    missing0 = hbar[0, :] <= 0
    missing0[0] = False
    hbar[0, missing0] = row_max[0]

    kept = hbar > 0
    np.fill_diagonal(kept, False)

    hp = hbar + hbar.T
    sums = hp.sum(axis=1)
    zero_row = sums <= 0
    hp = np.where(zero_row[:, None], 0.0, hp / np.where(zero_row, 1.0, sums)[:, None])
    row_cum = np.cumsum(hp, axis=1)

    for arr in (hbar, kept, hp, row_cum, zero_row):
        arr.flags.writeable = False
    return HeatMapAdjusted(M=int(M), kept=kept, hprime=hp, row_cum=row_cum, zero_row=zero_row)


def surrogate_T(pricing: PricingInstance, temperature: float) -> ProbMatrix:
    """Model-free probability matrix: row-wise softmax of -q/temperature.

    Stands in for a trained network so the full pipeline runs end to end;
    infeasible arcs carry the large penalty weight and get negligible mass.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    logits = -pricing.q / float(temperature)
    logits = logits - logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    return ProbMatrix(w / w.sum(axis=1, keepdims=True))


# -- binary matrix file format ----------------------------------------------
#
# magic "HMAP" | version 0x01 | uint32 LE n_total | n_total^2 float64 LE,
# row-major. Used both for probability matrices (*.hmap) and for the
# guidance-weight matrices (q.bin) exported with training samples.


def save_matrix(path, matrix) -> Path:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise HeatMapError("only square matrices are stored")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(bytes([MATRIX_VERSION]))
        fh.write(struct.pack("<I", matrix.shape[0]))
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
    return path


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 9 or blob[:4] != MATRIX_MAGIC:
        raise HeatMapError(f"{path}: not a matrix file (bad magic)")
    if blob[4] != MATRIX_VERSION:
        raise HeatMapError(f"{path}: unsupported version {blob[4]}")
    (n_total,) = struct.unpack("<I", blob[5:9])
    expected = 9 + 8 * n_total * n_total
    if len(blob) != expected:
        raise HeatMapError(f"{path}: size mismatch, header promises {expected} bytes, file has {len(blob)}")
    data = np.frombuffer(blob, dtype="<f8", offset=9)
    return data.reshape(n_total, n_total).astype(float)


def load_T(path, expected_n: int | None = None) -> ProbMatrix:
    """Load and validate a probability matrix.

    Rows whose sums drift from 1 by at most ROW_SUM_REJECT are
    renormalized; anything worse is rejected. expected_n is the customer
    count the matrix must match (n_total = expected_n + 1).
    """
    T = load_matrix(path)
    if expected_n is not None and T.shape[0] != expected_n + 1:
        raise HeatMapError(f"{path}: matrix is {T.shape[0]}x{T.shape[0]}, instance needs {expected_n + 1}")
    if np.any(~np.isfinite(T)):
        raise HeatMapError(f"{path}: non-finite entries")
    if np.any(T < 0):
        raise HeatMapError(f"{path}: negative entries")
    sums = T.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_REJECT):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise HeatMapError(f"{path}: row {bad} sums to {sums[bad]:.6f}")
    # renormalize only rows that drifted, so save/load round-trips bitwise
    drifted = np.abs(sums - 1.0) > 1e-9
    if drifted.any():
        T = np.where(drifted[:, None], T / sums[:, None], T)
    return ProbMatrix(T)


def save_T(path, T: ProbMatrix | np.ndarray) -> Path:
    return save_matrix(path, T.probs if isinstance(T, ProbMatrix) else T)
