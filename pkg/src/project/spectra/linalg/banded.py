"""
Packed symmetric band storage and the kernels that work on it.

bands[k, j] holds S[j + k, j] for k = 0..d and j < p - k; the tail of row k is
zero padding. Only the lower band is stored.
"""
import math
import os
import struct
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from src.core.errors import DimensionMismatchError
from src.core.utils.report_logger import ReportLogger

logger = ReportLogger()

HEADER = struct.Struct('<qq')
ROW_BLOCK = 256


class BandedSymmetricMatrix:
    """Immutable p x p symmetric matrix with half-bandwidth d."""

    def __init__(self, bands: np.ndarray):
        bands = np.array(bands, dtype=np.float64, copy=True)
        if bands.ndim != 2 or bands.shape[1] < 1:
            raise DimensionMismatchError(f"band storage must have shape (d+1, p), got {bands.shape}")
        if bands.shape[0] > bands.shape[1]:
            raise DimensionMismatchError(f"half-bandwidth {bands.shape[0] - 1} exceeds p - 1 = {bands.shape[1] - 1}")
        if not np.all(np.isfinite(bands)):
            raise ValueError("band storage contains non-finite values")
        for k in range(1, bands.shape[0]):
            bands[k, bands.shape[1] - k:] = 0.0
        bands.flags.writeable = False
        self._bands = bands

    @property
    def bands(self) -> np.ndarray:
        return self._bands

    @property
    def dimension(self) -> int:
        return self._bands.shape[1]

    @property
    def half_bandwidth(self) -> int:
        return self._bands.shape[0] - 1

    @property
    def shape(self):
        return (self.dimension, self.dimension)

    def diagonal(self, k: int = 0) -> np.ndarray:
        """The k-th subdiagonal, length p - k."""
        if not 0 <= k <= self.half_bandwidth:
            return np.zeros(max(self.dimension - abs(k), 0))
        return self._bands[k, :self.dimension - k]

    def trace(self) -> float:
        return float(self._bands[0].sum())

    def to_dense(self) -> np.ndarray:
        p = self.dimension
        dense = np.diag(self._bands[0].copy())
        for k in range(1, self.half_bandwidth + 1):
            values = self._bands[k, :p - k]
            dense += np.diag(values, -k) + np.diag(values, k)
        return dense

    @classmethod
    def from_dense(cls, matrix: np.ndarray, d: Optional[int] = None) -> 'BandedSymmetricMatrix':
        """Lower band of a symmetric matrix; entries outside the band are dropped."""
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {matrix.shape}")
        p = matrix.shape[0]
        d = p - 1 if d is None else min(d, p - 1)
        bands = np.zeros((d + 1, p))
        for k in range(d + 1):
            bands[k, :p - k] = np.diagonal(matrix, -k)
        return cls(bands)

    @classmethod
    def identity(cls, p: int) -> 'BandedSymmetricMatrix':
        return cls(np.ones((1, p)))

    # ============================================
    # Binary dump
    # ============================================

    def to_bytes(self) -> bytes:
        """Header (p, d) as little-endian int64, then the bands row by row as float64."""
        body = np.ascontiguousarray(self._bands, dtype='<f8').tobytes()
        return HEADER.pack(self.dimension, self.half_bandwidth) + body

    @classmethod
    def from_bytes(cls, payload: bytes) -> 'BandedSymmetricMatrix':
        if len(payload) < HEADER.size:
            raise ValueError("payload shorter than the band header")
        p, d = HEADER.unpack_from(payload)
        expected = HEADER.size + 8 * (d + 1) * p
        if p < 1 or d < 0 or len(payload) != expected:
            raise ValueError(f"band payload of {len(payload)} bytes does not match header p={p}, d={d}")
        bands = np.frombuffer(payload, dtype='<f8', offset=HEADER.size).reshape(d + 1, p)
        return cls(bands)

    def save(self, path: str):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'wb') as handle:
            handle.write(self.to_bytes())
        logger.debug(f"Saved band storage p={self.dimension}, d={self.half_bandwidth} to {path}")

    @classmethod
    def load(cls, path: str) -> 'BandedSymmetricMatrix':
        with open(path, 'rb') as handle:
            return cls.from_bytes(handle.read())

    def __eq__(self, other) -> bool:
        return isinstance(other, BandedSymmetricMatrix) and np.array_equal(self._bands, other._bands)

    def __hash__(self):
        return hash((self.dimension, self.half_bandwidth, self._bands.tobytes()))

    def __repr__(self) -> str:
        return f"BandedSymmetricMatrix(p={self.dimension}, d={self.half_bandwidth})"


# ============================================
# Gram construction
# ============================================

def _gram_block(X: np.ndarray, d: int, start: int, stop: int) -> np.ndarray:
    """Band entries for columns start..stop-1, unscaled."""
    p = X.shape[0]
    block = np.zeros((d + 1, stop - start))
    for k in range(d + 1):
        end = min(stop, p - k)
        if end <= start:
            break
        block[k, :end - start] = np.einsum('ij,ij->i', X[start + k:end + k], X[start:end])
    return block


def banded_gram(X: np.ndarray, d: int, workers: int = 1) -> BandedSymmetricMatrix:
    """(1/n) X X' masked to |i - j| <= d; d >= p - 1 means no masking."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionMismatchError(f"data matrix must be a nonempty p x n array, got shape {X.shape}")
    if d < 0:
        raise ValueError(f"half-bandwidth must be >= 0, got {d}")
    p, n = X.shape
    d = min(d, p - 1)
    X = np.ascontiguousarray(X)
    # fixed block boundaries keep every entry's arithmetic independent of the worker count
    starts = list(range(0, p, ROW_BLOCK))
    if workers > 1 and len(starts) > 1:
        blocks = Parallel(n_jobs=workers, prefer="threads")(
            delayed(_gram_block)(X, d, start, min(start + ROW_BLOCK, p)) for start in starts
        )
    else:
        blocks = [_gram_block(X, d, start, min(start + ROW_BLOCK, p)) for start in starts]
    bands = np.concatenate(blocks, axis=1) / n
    return BandedSymmetricMatrix(bands)


# ============================================
# Products
# ============================================

def matvec(S: BandedSymmetricMatrix, v: np.ndarray) -> np.ndarray:
    """S @ v for a vector or a (p, m) block of vectors."""
    v = np.asarray(v, dtype=np.float64)
    p = S.dimension
    if v.ndim not in (1, 2) or v.shape[0] != p:
        raise DimensionMismatchError(f"operand of shape {v.shape} does not match dimension {p}")
    bands = S.bands if v.ndim == 1 else S.bands[:, :, None]
    out = bands[0] * v
    for k in range(1, S.half_bandwidth + 1):
        band = bands[k, :p - k]
        out[k:] += band * v[:p - k]
        out[:p - k] += band * v[k:]
    return out


def _offset_storage(S: BandedSymmetricMatrix) -> np.ndarray:
    """All diagonals -d..d indexed by column: F[d + o, i] = S[i + o, i], zero outside the matrix."""
    p, d = S.dimension, S.half_bandwidth
    F = np.zeros((2 * d + 1, p))
    F[d] = S.bands[0]
    for k in range(1, d + 1):
        F[d + k, :p - k] = S.bands[k, :p - k]
        F[d - k, k:] = S.bands[k, :p - k]
    return F


def _multiply(A: np.ndarray, wa: int, F: np.ndarray, d: int) -> np.ndarray:
    """Offset storage of A @ S from A (half-width wa) and S (half-width d)."""
    p = A.shape[1]
    wc = wa + d
    C = np.zeros((2 * wc + 1, p))
    padded = np.zeros((2 * wa + 1, p + 2 * d))
    padded[:, d:d + p] = A
    # C[i+o, i] = sum_s A[i+o, i+s] * S[i+s, i]
    for s in range(-d, d + 1):
        C[wc + s - wa:wc + s + wa + 1] += padded[:, d + s:d + s + p] * F[d + s]
    return C


def _frobenius(A: np.ndarray, wa: int, B: np.ndarray, wb: int) -> float:
    """<A, B>_F over the common offsets; equals tr(A B) for symmetric B."""
    w = min(wa, wb)
    return float(np.sum(A[wa - w:wa + w + 1] * B[wb - w:wb + w + 1]))


def trace_powers(S: BandedSymmetricMatrix, lmax: int) -> np.ndarray:
    """[tr(S), tr(S^2), ..., tr(S^lmax)]."""
    if lmax < 1:
        raise ValueError(f"lmax must be >= 1, got {lmax}")
    p, d = S.dimension, S.half_bandwidth
    if lmax * d >= p:
        from src.project.spectra.linalg.eigensolver import eigenvalues
        logger.debug(f"trace_powers: lmax*d = {lmax * d} >= p = {p}, using eigenvalues")
        return power_sums(eigenvalues(S), lmax)

    F = _offset_storage(S)
    half = math.ceil(lmax / 2)
    powers: List[np.ndarray] = [F]
    for _ in range(1, half):
        powers.append(_multiply(powers[-1], len(powers) * d, F, d))
    traces = np.empty(lmax)
    for l in range(1, lmax + 1):
        a = math.ceil(l / 2)
        b = l - a
        if b == 0:
            traces[l - 1] = float(np.sum(powers[a - 1][a * d]))
        else:
            traces[l - 1] = _frobenius(powers[a - 1], a * d, powers[b - 1], b * d)
    return traces


def trace_power(S: BandedSymmetricMatrix, l: int) -> float:
    """tr(S^l), unnormalized."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    if l == 1:
        return S.trace()
    return float(trace_powers(S, l)[l - 1])


def power_sums(values: np.ndarray, lmax: int) -> np.ndarray:
    """[sum x, sum x^2, ..., sum x^lmax]."""
    values = np.asarray(values, dtype=np.float64)
    sums = np.empty(lmax)
    current = np.ones_like(values)
    for l in range(lmax):
        current = current * values
        sums[l] = float(current.sum())
    return sums
