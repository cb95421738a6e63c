"""
Brute-force ground truth at tiny sizes.

Everything here is exact and exhaustive; sizes beyond the configured oracle
budget are refused instead of approximated.
"""
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from src.core.errors import BudgetExceededError
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.project.spectra.combinatorics import (
    I_LINE, K_LINE, DegreeProfile, PlaneTree, restricted_growth_strings, try_tree_from_walk,
)
from src.project.spectra.metrics import StepCDF

logger = ReportLogger()


def _check_budget(p: int, n: int, l: int):
    if p < 1 or n < 1 or l < 1:
        raise ValueError(f"p, n and l must be positive, got p={p}, n={n}, l={l}")
    requested = (p * n) ** l
    cap = ConfigManager().get_oracle_budget()
    if requested > cap:
        logger.log_budget("oracle", requested, cap)
        raise BudgetExceededError("oracle", requested, cap)


def banded_cycles(p: int, d: int, l: int) -> Iterator[Tuple[int, ...]]:
    """I-line tuples (i_1..i_l) with |i_s - i_{s+1}| <= d, cyclically."""
    for indices in itertools.product(range(p), repeat=l):
        if all(abs(indices[s] - indices[(s + 1) % l]) <= d for s in range(l)):
            yield indices


def _pattern_weight(n: int, pattern: Tuple[int, ...]) -> int:
    """Number of K-label tuples with the equality pattern of a restricted growth string."""
    return math.perm(n, max(pattern) + 1)


def _entry_multiplicities(indices: Tuple[int, ...], pattern: Tuple[int, ...]) -> Counter:
    """Multiplicity of each X entry in prod_j X[i_j, k_j] X[i_{j+1}, k_j]."""
    l = len(indices)
    counts: Counter = Counter()
    for j in range(l):
        counts[(indices[j], pattern[j])] += 1
        counts[(indices[(j + 1) % l], pattern[j])] += 1
    return counts


def exact_expected_moment(p: int, n: int, d: int, l: int, even_moments: Sequence) -> Fraction:
    """
    E m_{p,l} = E tr(S^l) / p for symmetric i.i.d. entries.

    even_moments[j] is E X^(2(j+1)); odd moments vanish. K-labels are summed by
    equality pattern, each pattern standing for n!/(n-b)! labellings with b
    distinct labels.
    """
    _check_budget(p, n, l)
    if d < 0:
        raise ValueError(f"half-bandwidth must be >= 0, got {d}")
    moments = [Fraction(m) for m in even_moments]
    patterns = [(pattern, _pattern_weight(n, pattern))
                for pattern in restricted_growth_strings(l) if max(pattern) < n]

    total = Fraction(0)
    for indices in banded_cycles(p, d, l):
        for pattern, weight in patterns:
            expectation = Fraction(1)
            for multiplicity in _entry_multiplicities(indices, pattern).values():
                if multiplicity % 2:
                    expectation = Fraction(0)
                    break
                order = multiplicity // 2
                if order > len(moments):
                    raise ValueError(f"E X^{multiplicity} is needed but only {len(moments)} even moments were given")
                expectation *= moments[order - 1]
            total += weight * expectation
    result = total / (p * n ** l)
    logger.debug(f"exact E m_(p,l) for p={p}, n={n}, d={d}, l={l}: {result}")
    return result


@dataclass
class BandedTreeCensus:
    """Tree-shaped walks counted by canonical tree and by K-line degree profile."""

    p: int
    n: int
    d: int
    l: int
    by_tree: Dict[PlaneTree, int] = field(default_factory=dict)

    @property
    def by_profile(self) -> Dict[DegreeProfile, int]:
        counts: Counter = Counter()
        for tree, count in self.by_tree.items():
            counts[tree.profile] += count
        return dict(counts)

    def by_r(self) -> List[int]:
        counts = [0] * self.l
        for tree, count in self.by_tree.items():
            counts[tree.r] += count
        return counts

    @property
    def total(self) -> int:
        return sum(self.by_tree.values())

    def count(self, profile: DegreeProfile) -> int:
        return self.by_profile.get(profile, 0)


def brute_count_banded_trees(p: int, n: int, d: int, l: int) -> BandedTreeCensus:
    """Walks i_1 k_1 ... i_l k_l i_1 that traverse a tree, every I-step within the band."""
    _check_budget(p, n, l)
    if d < 0:
        raise ValueError(f"half-bandwidth must be >= 0, got {d}")
    census = BandedTreeCensus(p, n, d, l)
    counts: Counter = Counter()
    patterns = [pattern for pattern in restricted_growth_strings(l) if max(pattern) < n]
    for indices in banded_cycles(p, d, l):
        for pattern in patterns:
            walk = []
            for i, k in zip(indices, pattern):
                walk.append((I_LINE, i))
                walk.append((K_LINE, k))
            tree = try_tree_from_walk(walk)
            if tree is not None:
                counts[tree] += _pattern_weight(n, pattern)
    census.by_tree = dict(counts)
    logger.debug(f"banded tree census p={p}, n={n}, d={d}, l={l}: {census.total} walks")
    return census


def brute_levy(F: StepCDF, G: StepCDF, grid: Sequence[float]) -> float:
    """
    Smallest eps among multiples of the grid step for which
    F(x - eps) - eps <= G(x) <= F(x + eps) + eps holds at every grid point.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.isfinite(grid)):
        raise ValueError("grid must be a finite array of at least two points")
    step = float(np.min(np.diff(np.sort(grid))))
    if step <= 0:
        raise ValueError("grid points must be distinct")
    G_values = G(grid)
    for j in range(int(math.ceil(1.0 / step)) + 1):
        eps = min(j * step, 1.0)
        if np.all(F(grid - eps) - eps <= G_values) and np.all(G_values <= F(grid + eps) + eps):
            return eps
    return 1.0
