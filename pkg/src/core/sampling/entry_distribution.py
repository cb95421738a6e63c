"""
Entry distributions for the data matrix: mean 0, variance 1, symmetric.
"""
import math
from enum import Enum
from fractions import Fraction
from typing import List, Tuple

import numpy as np

UNIFORM_HALF_WIDTH = math.sqrt(3.0)


class EntryDistribution(Enum):
    """Enumeration of supported entry distributions."""

    NORMAL = "normal"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"

    @classmethod
    def get_all_distributions(cls) -> List[str]:
        return [dist.value for dist in cls]

    @classmethod
    def is_supported(cls, name: str) -> bool:
        return name.lower() in cls.get_all_distributions()

    @classmethod
    def get_distribution(cls, name: str) -> 'EntryDistribution':
        """Get distribution by name."""
        name = name.lower()
        for dist in cls:
            if dist.value == name:
                return dist
        raise ValueError(f"Unsupported distribution: {name} (choose from {', '.join(cls.get_all_distributions())})")

    def sample(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        """Draw a float64 array of independent entries."""
        if self is EntryDistribution.NORMAL:
            return rng.standard_normal(shape)
        if self is EntryDistribution.RADEMACHER:
            return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
        # uniform on [-sqrt(3), sqrt(3)] has variance 1
        return rng.uniform(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH, size=shape)

    def even_moment(self, k: int) -> Fraction:
        """E X^(2k) as an exact rational."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        if self is EntryDistribution.NORMAL:
            # (2k-1)!!
            return Fraction(math.prod(range(1, 2 * k, 2)))
        if self is EntryDistribution.RADEMACHER:
            return Fraction(1)
        return Fraction(3 ** k, 2 * k + 1)

    def even_moments(self, count: int) -> List[Fraction]:
        """[E X^2, E X^4, ..., E X^(2*count)]."""
        return [self.even_moment(k) for k in range(1, count + 1)]

    def __str__(self) -> str:
        return self.value
