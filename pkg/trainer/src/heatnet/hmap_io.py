"""The square-matrix binary container shared with the solver.

Layout: magic "HMAP", version byte 0x01, little-endian uint32 node count,
then count^2 float64 values row-major. Probability matrices (.hmap) and
guidance-weight matrices (q.bin) both use it.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"HMAP"
VERSION = 1


class MatrixFileError(ValueError):
    pass


def write_matrix(path, matrix) -> Path:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MatrixFileError("only square matrices are stored")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        fh.write(struct.pack("<I", matrix.shape[0]))
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
    return path


def read_matrix(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if len(blob) < 9 or blob[:4] != MAGIC:
        raise MatrixFileError(f"{path}: bad magic")
    if blob[4] != VERSION:
        raise MatrixFileError(f"{path}: unsupported version {blob[4]}")
    (count,) = struct.unpack("<I", blob[5:9])
    if len(blob) != 9 + 8 * count * count:
        raise MatrixFileError(f"{path}: truncated or oversized payload")
    return np.frombuffer(blob, dtype="<f8", offset=9).reshape(count, count).astype(float)
