"""
Hutchinson estimates of tr(S^l) from Rademacher probes.
"""
import math
from dataclasses import dataclass

import numpy as np

from src.core.sampling.stream_factory import StreamFactory
from src.project.spectra.linalg.banded import BandedSymmetricMatrix, matvec

PROBE_CHUNK = 256


@dataclass(frozen=True)
class TraceEstimate:
    estimate: float
    standard_error: float
    probes: int


def _apply_power(S: BandedSymmetricMatrix, block: np.ndarray, power: int) -> np.ndarray:
    for _ in range(power):
        block = matvec(S, block)
    return block


def hutchinson_trace(S: BandedSymmetricMatrix, l: int, probes: int, seed: int) -> TraceEstimate:
    """Mean of v' S^l v over independent +-1 probes, with its sample standard error."""
    if probes < 2:
        raise ValueError(f"probes must be >= 2, got {probes}")
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    rng = StreamFactory(seed).generator(0)
    half = math.ceil(l / 2)
    samples = np.empty(probes)
    done = 0
    while done < probes:
        width = min(PROBE_CHUNK, probes - done)
        V = rng.integers(0, 2, size=(S.dimension, width)).astype(np.float64) * 2.0 - 1.0
        left = _apply_power(S, V, half)
        right = _apply_power(S, V, l - half)
        # v' S^l v = (S^half v) . (S^(l-half) v)
        samples[done:done + width] = np.einsum('ij,ij->j', left, right)
        done += width
    estimate = float(samples.mean())
    standard_error = float(samples.std(ddof=1) / math.sqrt(probes))
    return TraceEstimate(estimate, standard_error, probes)
