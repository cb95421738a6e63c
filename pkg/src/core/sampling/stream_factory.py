"""
Per-replicate random streams that do not depend on scheduling order.
"""
import numpy as np


class StreamFactory:
    """Builds one counter-based generator per (seed, replicate index) pair."""

    def __init__(self, seed: int):
        if not 0 <= seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)

    def generator(self, replicate_index: int, stream: int = 0) -> np.random.Generator:
        """Philox generator keyed by the seed plus a (replicate, stream) spawn key."""
        if replicate_index < 0:
            raise ValueError("replicate_index must be nonnegative")
        sequence = np.random.SeedSequence(self.seed, spawn_key=(int(replicate_index), int(stream)))
        return np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"StreamFactory(seed={self.seed})"
