"""
Distances between spectral distributions.

Every distribution is a right-continuous step CDF with finitely many jumps, so
both distances are computed exactly from the jump sets.
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.project.spectra.moments import MomentPolynomial, Number

LEVY_TOLERANCE = 1e-12


class StepCDF:
    """Nondecreasing right-continuous step function with total mass 1."""

    def __init__(self, locations: np.ndarray, cumulative: np.ndarray):
        locations = np.asarray(locations, dtype=np.float64)
        cumulative = np.asarray(cumulative, dtype=np.float64)
        if locations.ndim != 1 or locations.shape != cumulative.shape or locations.size == 0:
            raise ValueError("a step CDF needs matching, nonempty jump locations and cumulative weights")
        if not np.all(np.isfinite(locations)):
            raise ValueError("jump locations must be finite")
        if np.any(np.diff(locations) <= 0):
            raise ValueError("jump locations must be strictly increasing")
        if np.any(np.diff(cumulative) < 0) or cumulative[0] < 0:
            raise ValueError("cumulative weights must be nondecreasing and nonnegative")
        if abs(cumulative[-1] - 1.0) > 1e-12:
            raise ValueError(f"total mass must be 1, got {cumulative[-1]}")
        cumulative = cumulative.copy()
        cumulative[-1] = 1.0
        self.locations = locations
        self.cumulative = cumulative

    @classmethod
    def from_sample(cls, values: Sequence[float]) -> 'StepCDF':
        """Empirical CDF; tied values accumulate their weight at one jump."""
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.size == 0:
            raise ValueError("cannot build an empirical CDF from an empty sample")
        locations, counts = np.unique(values, return_counts=True)
        return cls(locations, np.cumsum(counts) / values.size)

    @classmethod
    def from_weights(cls, locations: Sequence[float], weights: Sequence[float]) -> 'StepCDF':
        """Discrete measure with the given point masses, normalized to total mass 1."""
        locations = np.asarray(locations, dtype=np.float64).ravel()
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if locations.shape != weights.shape:
            raise ValueError("locations and weights must have the same length")
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("weights must be nonnegative with a positive total")
        unique, inverse = np.unique(locations, return_inverse=True)
        merged = np.zeros(unique.size)
        np.add.at(merged, inverse, weights)
        return cls(unique, np.cumsum(merged) / merged.sum())

    @classmethod
    def point_mass(cls, location: float) -> 'StepCDF':
        return cls(np.array([location]), np.array([1.0]))

    def __call__(self, x):
        index = np.searchsorted(self.locations, x, side='right') - 1
        return np.where(index >= 0, self.cumulative[np.maximum(index, 0)], 0.0)

    def left_limit(self, x):
        """F(x-)."""
        index = np.searchsorted(self.locations, x, side='left') - 1
        return np.where(index >= 0, self.cumulative[np.maximum(index, 0)], 0.0)

    def __len__(self) -> int:
        return self.locations.size

    def __repr__(self) -> str:
        return f"StepCDF(jumps={len(self)}, support=[{self.locations[0]}, {self.locations[-1]}])"


def kolmogorov_distance(F: StepCDF, G: StepCDF) -> float:
    """sup |F - G|, attained at a jump or just left of one."""
    jumps = np.union1d(F.locations, G.locations)
    at = np.abs(F(jumps) - G(jumps))
    before = np.abs(F.left_limit(jumps) - G.left_limit(jumps))
    return float(max(at.max(), before.max()))


def _dominated(F: StepCDF, G: StepCDF, eps: float) -> bool:
    """G(x) <= F(x + eps) + eps for every x."""
    # G(x) - F(x + eps) only changes at jumps of G and at jumps of F shifted by -eps
    if np.any(G(G.locations) - F(G.locations + eps) > eps):
        return False
    return not np.any(G(F.locations - eps) - F.cumulative > eps)


def levy_sandwich_holds(F: StepCDF, G: StepCDF, eps: float) -> bool:
    """F(x - eps) - eps <= G(x) <= F(x + eps) + eps for every x."""
    return _dominated(F, G, eps) and _dominated(G, F, eps)


def levy_distance(F: StepCDF, G: StepCDF, tolerance: float = LEVY_TOLERANCE) -> float:
    """Smallest eps satisfying the sandwich, by bisection on [0, 1]."""
    if levy_sandwich_holds(F, G, 0.0):
        return 0.0
    low, high = 0.0, 1.0
    while high - low > tolerance:
        middle = 0.5 * (low + high)
        if levy_sandwich_holds(F, G, middle):
            high = middle
        else:
            low = middle
    return high


# ============================================
# Moment comparison
# ============================================

@dataclass(frozen=True)
class MomentReportRow:
    order: int
    empirical: float
    theory_gamma: float
    theory_y: float
    relative_error_gamma: float
    relative_error_y: float

    @property
    def preferred(self) -> str:
        if self.relative_error_gamma < self.relative_error_y:
            return "gamma"
        if self.relative_error_y < self.relative_error_gamma:
            return "y"
        return "tie"

    def as_dict(self) -> dict:
        return {
            'l': self.order,
            'empirical': self.empirical,
            'theory_gamma': self.theory_gamma,
            'theory_y': self.theory_y,
            'rel_err_gamma': self.relative_error_gamma,
            'rel_err_y': self.relative_error_y,
            'preferred': self.preferred,
        }


def _relative_error(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def moment_report(sample_moments: Sequence[float], theory: Sequence[MomentPolynomial],
                  gamma: Number) -> List[MomentReportRow]:
    """Empirical moments against the gamma- and y-convention values, order by order."""
    if len(sample_moments) != len(theory):
        raise ValueError(f"{len(sample_moments)} empirical moments against {len(theory)} theoretical ones")
    rows = []
    for position, (empirical, polynomial) in enumerate(zip(sample_moments, theory), start=1):
        if polynomial.order != position:
            raise ValueError(f"theory entry {position} is the order-{polynomial.order} polynomial")
        theory_gamma = float(polynomial.evaluate(gamma))
        theory_y = float(polynomial.evaluate_y_convention(gamma))
        empirical = float(empirical)
        rows.append(MomentReportRow(position, empirical, theory_gamma, theory_y,
                                    _relative_error(empirical, theory_gamma),
                                    _relative_error(empirical, theory_y)))
    return rows
