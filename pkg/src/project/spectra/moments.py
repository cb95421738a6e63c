"""
Limiting moments of banded sample covariance spectra.

The canonical parameter is gamma = lim d/n. Each canonical tree with r + 1
I-line vertices contributes gamma^r times the product of c_D over its K-line
vertex degrees D. The same coefficients evaluated at y = 2 * gamma give the
"y convention" value, reported next to the gamma value for comparison.
"""
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.integrate

from src.core.errors import RegimeViolationError
from src.core.utils.report_logger import ReportLogger
from src.project.spectra import combinatorics
from src.project.spectra.combinatorics import DegreeProfile, PlaneTree

logger = ReportLogger()

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class DegreeFactor:
    degree: int
    value: Fraction


@lru_cache(maxsize=None)
def _degree_factor_value(D: int) -> Fraction:
    total = Fraction(0)
    for j in range((D + 1) // 2):
        total += Fraction((-1) ** j * D * (D - 2 * j) ** (D - 1),
                          math.factorial(j) * math.factorial(D - j))
    return total


def degree_factor(D: int) -> DegreeFactor:
    """c_D, the leading coefficient of F(D*d, D, 2d) in d^(D-1)."""
    if D < 1:
        raise ValueError(f"degree must be >= 1, got {D}")
    return DegreeFactor(D, _degree_factor_value(D))


def _is_exact(x: Number) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class MomentPolynomial:
    """Exact polynomial in gamma; coefficients[r] multiplies gamma^r."""

    order: int
    coefficients: Tuple[Fraction, ...]

    def evaluate(self, gamma: Number) -> Number:
        """Value at gamma; exact for int/Fraction input, float otherwise."""
        if gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        if _is_exact(gamma):
            return sum((c * Fraction(gamma) ** r for r, c in enumerate(self.coefficients)), Fraction(0))
        return float(sum(float(c) * float(gamma) ** r for r, c in enumerate(self.coefficients)))

    def evaluate_y_convention(self, gamma: Number) -> Number:
        """The same coefficients at y = 2 * gamma."""
        return self.evaluate(2 * gamma)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient_strings(self) -> List[str]:
        return [format_fraction(c) for c in self.coefficients]

    def __str__(self) -> str:
        terms = []
        for r, c in enumerate(self.coefficients):
            if c == 0:
                continue
            coefficient = format_fraction(c)
            if r == 0:
                terms.append(coefficient)
            else:
                power = "γ" if r == 1 else f"γ^{r}"
                terms.append(power if c == 1 else f"{coefficient}{power}")
        return " + ".join(terms) if terms else "0"


def format_fraction(value: Fraction) -> str:
    """'a/b', or 'a' for integers."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def tree_contribution(tree: PlaneTree) -> Tuple[int, Fraction]:
    """(r, product of c_D) for one canonical tree; the term is that product times gamma^r."""
    weight = Fraction(1)
    for D in tree.profile:
        weight *= degree_factor(D).value
    return tree.r, weight


def limit_moment_polynomial(l: int, cap: Optional[int] = None) -> MomentPolynomial:
    """Sum of tree contributions over the canonical trees with l edges."""
    classes: Counter = Counter()
    for tree in combinatorics.enumerate_canonical_trees(l, cap=cap):
        classes[(tree.r, tree.profile)] += 1
    coefficients = [Fraction(0)] * l
    for (r, profile), multiplicity in classes.items():
        weight = Fraction(1)
        for D in profile:
            weight *= degree_factor(D).value
        coefficients[r] += multiplicity * weight
    logger.debug(f"m_{l}: {len(classes)} (r, profile) classes")
    return MomentPolynomial(l, tuple(coefficients))


def limit_moment_value(l: int, gamma: Number, cap: Optional[int] = None) -> Number:
    return limit_moment_polynomial(l, cap=cap).evaluate(gamma)


@dataclass(frozen=True)
class MomentRow:
    order: int
    polynomial: MomentPolynomial
    value_gamma: Number
    value_y: Number


def moment_table(lmax: int, gamma: Number, cap: Optional[int] = None) -> List[MomentRow]:
    """Rows l = 1..lmax with the gamma- and y-convention values."""
    if lmax < 1:
        raise ValueError(f"lmax must be >= 1, got {lmax}")
    rows = []
    for l, polynomial in moment_polynomials(lmax, cap=cap).items():
        rows.append(MomentRow(l, polynomial, polynomial.evaluate(gamma), polynomial.evaluate_y_convention(gamma)))
    return rows


def banded_class_size_leading(p: int, n: int, d: int, profile: DegreeProfile, r: int) -> int:
    """
    Leading term p * n^(l-r) * prod F(D*d, D, 2d) of the number of d-banded
    labelled trees in one isomorphism class. Error terms are not modelled.
    """
    l = profile.edge_count
    if len(profile) != l - r:
        raise ValueError(f"profile {profile} has {len(profile)} K-vertices, expected l - r = {l - r}")
    if d < l or p <= 2 * l * d:
        raise RegimeViolationError(f"leading term needs d >= l and p > 2ld (p={p}, d={d}, l={l})")
    size = p * n ** (l - r)
    for D in profile:
        size *= combinatorics.count_restricted_compositions(D * d, D, 2 * d)
    return size


# ============================================
# Marcenko-Pastur reference
# ============================================

def mp_moment(l: int, y: Number) -> Number:
    """Marcenko-Pastur moment sum_r N(l, r) y^r; exact for rational y."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if _is_exact(y):
        return sum((combinatorics.narayana_count(l, r) * Fraction(y) ** r for r in range(l)), Fraction(0))
    return float(sum(combinatorics.narayana_count(l, r) * float(y) ** r for r in range(l)))


def support_bound(y: float) -> float:
    """(1 + sqrt(y))^2."""
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    return (1.0 + math.sqrt(y)) ** 2


def mp_edges(y: float) -> Tuple[float, float]:
    root = math.sqrt(y)
    return (1.0 - root) ** 2, (1.0 + root) ** 2


def mp_density(x, y: float):
    """Absolutely continuous part of the Marcenko-Pastur law with ratio y and unit variance."""
    if y <= 0:
        raise ValueError(f"y must be > 0, got {y}")
    lower, upper = mp_edges(y)
    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))
    inside = (points > lower) & (points < upper) & (points > 0)
    density = np.zeros_like(points)
    xi = points[inside]
    density[inside] = np.sqrt((upper - xi) * (xi - lower)) / (2.0 * np.pi * y * xi)
    return float(density[0]) if scalar else density


def mp_atom(y: float) -> float:
    """Mass at zero, 1 - 1/y when y > 1."""
    return max(0.0, 1.0 - 1.0 / y) if y > 0 else 0.0


def mp_cdf(x: float, y: float) -> float:
    """Marcenko-Pastur CDF at x, the atom included."""
    lower, upper = mp_edges(y)
    if x < 0:
        return 0.0
    mass = mp_atom(y)
    if x <= lower:
        return mass
    if x >= upper:
        return 1.0
    integral, _ = scipy.integrate.quad(lambda t: float(mp_density(t, y)), lower, x, limit=200)
    return min(1.0, mass + integral)


def moment_polynomials(lmax: int, cap: Optional[int] = None) -> Dict[int, MomentPolynomial]:
    """m_1..m_lmax keyed by order."""
    return {l: limit_moment_polynomial(l, cap=cap) for l in range(1, lmax + 1)}
