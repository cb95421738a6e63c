"""
Oracle cross-checks behind the `verify` command.

Each check recomputes a quantity two independent ways and reports pass/fail.
The fast suite finishes in seconds; the full suite adds the large-d limits,
the banded-tree census and a small ensemble.
"""
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np

from src.core.sampling.entry_distribution import EntryDistribution
from src.core.utils.report_logger import ReportLogger
from src.core.utils.verification import Verification
from src.project.spectra import combinatorics, metrics, moments, oracle
from src.project.spectra.combinatorics import DegreeProfile
from src.project.spectra.linalg.banded import BandedSymmetricMatrix, power_sums, trace_powers
from src.project.spectra.linalg.eigensolver import eigenvalues

SUITES = ("fast", "full")
CheckOutcome = Tuple[bool, str]


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    run: Callable[[], CheckOutcome]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _leading_coefficient(D: int) -> Fraction:
    """Leading coefficient of the degree D-1 polynomial d -> F(D*d, D, 2d), by finite differences."""
    values = [combinatorics.count_restricted_compositions(D * d, D, 2 * d) for d in range(1, D + 1)]
    for _ in range(D - 1):
        values = [b - a for a, b in zip(values, values[1:])]
    return Fraction(values[0], math.factorial(D - 1))


def _gram_second_moment(p: int, n: int, d: int, fourth_moment: Fraction) -> Fraction:
    """E m_{p,2} in closed form: diagonal terms (E X^4 + n - 1)/n, off-diagonal 1/n."""
    pairs = 2 * d * p - d * (d + 1) if d < p else p * (p - 1)
    return (p * (fourth_moment + n - 1) / n + Fraction(pairs, n)) / p


class VerifySuite:
    """Registry of named checks, run in a fixed order."""

    def __init__(self, seed: int = 20240611):
        self.logger = ReportLogger()
        self.verification = Verification()
        self.seed = seed
        self.checks: List[Check] = [
            Check("compositions-count-vs-enumeration", "fast", self.check_compositions),
            Check("tree-census-catalan-narayana", "fast", self.check_tree_census),
            Check("degree-factor-leading-coefficient", "fast", self.check_degree_factors),
            Check("limit-polynomials-low-order", "fast", self.check_limit_polynomials),
            Check("exact-moment-oracle", "fast", self.check_exact_moments),
            Check("gamma-convention-at-l2", "fast", self.check_gamma_convention),
            Check("levy-vs-grid-oracle", "fast", self.check_levy),
            Check("eigensolver-vs-dense", "fast", self.check_eigensolver),
            Check("trace-powers-vs-eigenvalues", "fast", self.check_trace_powers),
            Check("degree-factor-large-d-ratio", "full", self.check_degree_factor_ratio),
            Check("banded-tree-leading-term", "full", self.check_leading_term),
            Check("unbanded-census-vs-ordered-trees", "full", self.check_unbanded_census),
            Check("ensemble-second-moment", "full", self.check_ensemble),
        ]

    def select(self, suite: str) -> List[Check]:
        if suite not in SUITES:
            raise ValueError(f"Unknown suite: {suite} (choose from {', '.join(SUITES)})")
        return [check for check in self.checks if suite == "full" or check.suite == "fast"]

    def run(self, suite: str = "fast") -> List[CheckResult]:
        selected = self.select(suite)
        self.logger.log_suite_start(suite, len(selected))
        started = time.perf_counter()
        results = []
        for check in selected:
            check_started = time.perf_counter()
            try:
                passed, detail = check.run()
            except Exception as e:
                self.logger.log_error(e, check.name)
                passed, detail = False, f"{type(e).__name__}: {e}"
            result = CheckResult(check.name, bool(passed), detail, time.perf_counter() - check_started)
            self.logger.log_check(result.name, result.passed, result.detail)
            results.append(result)
        failed = sum(1 for result in results if not result.passed)
        self.logger.log_suite_end(suite, len(results) - failed, failed, time.perf_counter() - started)
        return results

    # ============================================
    # Fast checks
    # ============================================

    def check_compositions(self) -> CheckOutcome:
        mismatches = 0
        for k in range(1, 5):
            for m in range(1, 6):
                for n in range(0, 17):
                    enumerated = sum(1 for _ in combinatorics.enumerate_restricted_compositions(n, k, m))
                    if enumerated != combinatorics.count_restricted_compositions(n, k, m):
                        mismatches += 1
        return self.verification.verify_equals(mismatches, 0, "composition counts"), f"{mismatches} mismatches"

    def check_tree_census(self) -> CheckOutcome:
        for l in range(1, 9):
            by_r = [0] * l
            total = 0
            for tree in combinatorics.enumerate_canonical_trees(l):
                total += 1
                by_r[tree.r] += 1
                walk = combinatorics.canonical_walk(tree)
                if combinatorics.tree_from_walk(walk) != tree:
                    return False, f"walk codec fails for {tree.child_counts}"
                shifted = tuple(3 * label + 1 for label in walk)
                if combinatorics.relabel_canonical(shifted) != walk or combinatorics.tree_from_walk(shifted) != tree:
                    return False, f"relabelled walk of {tree.child_counts} decodes differently"
            if total != combinatorics.catalan(l):
                return False, f"l={l}: {total} trees, Catalan is {combinatorics.catalan(l)}"
            expected = [combinatorics.narayana_count(l, r) for r in range(l)]
            if by_r != expected:
                return False, f"l={l}: per-r counts {by_r}, expected {expected}"
        return True, "l <= 8"

    def check_degree_factors(self) -> CheckOutcome:
        for D in range(1, 7):
            expected = _leading_coefficient(D)
            actual = moments.degree_factor(D).value
            if not self.verification.verify_equals(actual, expected, f"c_{D}"):
                return False, f"c_{D} = {actual}, finite differences give {expected}"
        return True, "D <= 6"

    def check_limit_polynomials(self) -> CheckOutcome:
        expected = {
            1: (Fraction(1),),
            2: (Fraction(1), Fraction(2)),
            3: (Fraction(1), Fraction(6), Fraction(3)),
        }
        for l, coefficients in expected.items():
            polynomial = moments.limit_moment_polynomial(l)
            if not self.verification.verify_equals(polynomial.coefficients, coefficients, f"m_{l}"):
                return False, f"m_{l} = {polynomial}"
        return True, "m_1, m_2, m_3"

    def check_exact_moments(self) -> CheckOutcome:
        rademacher = EntryDistribution.RADEMACHER.even_moments(4)
        normal = EntryDistribution.NORMAL.even_moments(4)
        if oracle.exact_expected_moment(4, 3, 2, 1, normal) != 1:
            return False, "E m_1 != 1"
        for p, n, d in ((3, 2, 1), (4, 3, 1), (5, 2, 4)):
            for even in (rademacher, normal):
                actual = oracle.exact_expected_moment(p, n, d, 2, even)
                expected = _gram_second_moment(p, n, d, even[1])
                if actual != expected:
                    return False, f"(p,n,d)=({p},{n},{d}): oracle {actual}, closed form {expected}"
        return True, "l = 1, 2"

    def check_gamma_convention(self) -> CheckOutcome:
        polynomial = moments.limit_moment_polynomial(2)
        rademacher = EntryDistribution.RADEMACHER.even_moments(2)
        for p, n, d in ((8, 8, 4), (16, 8, 4), (32, 8, 4)):
            exact = oracle.exact_expected_moment(p, n, d, 2, rademacher)
            gamma = Fraction(d, n)
            gap_gamma = abs(exact - polynomial.evaluate(gamma))
            gap_y = abs(exact - polynomial.evaluate_y_convention(gamma))
            if not gap_gamma < gap_y:
                return False, f"(p,n,d)=({p},{n},{d}): gamma gap {gap_gamma} >= y gap {gap_y}"
        return True, "gamma = d/n closer at every size"

    def check_levy(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed)
        grid = np.linspace(-1.0, 2.0, 3001)
        step = grid[1] - grid[0]
        pairs = [(metrics.StepCDF.point_mass(0.0), metrics.StepCDF.point_mass(0.5))]
        pairs += [(metrics.StepCDF.from_sample(rng.uniform(0, 1, 7)), metrics.StepCDF.from_sample(rng.uniform(0, 1, 5)))
                  for _ in range(5)]
        for F, G in pairs:
            exact = metrics.levy_distance(F, G)
            if not self.verification.verify_less_equal(exact, metrics.kolmogorov_distance(F, G) + 1e-12, "levy <= kolmogorov"):
                return False, "levy distance exceeds kolmogorov distance"
            if abs(exact - oracle.brute_levy(F, G, grid)) > 2 * step:
                return False, f"bisection {exact} vs grid {oracle.brute_levy(F, G, grid)}"
        return True, f"{len(pairs)} pairs within 2 grid steps"

    def check_eigensolver(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed)
        for trial in range(10):
            p = int(rng.integers(2, 31))
            d = int(rng.integers(0, p))
            S = BandedSymmetricMatrix.from_dense(_random_symmetric(rng, p), d)
            reference = np.linalg.eigvalsh(S.to_dense())
            actual = eigenvalues(S, backend="native")
            scale = max(1.0, float(np.max(np.abs(reference))))
            if np.max(np.abs(actual - reference)) > 1e-8 * scale:
                return False, f"trial {trial}: p={p}, d={d} deviates from the dense reference"
        return True, "10 random matrices"

    def check_trace_powers(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed + 1)
        S = BandedSymmetricMatrix.from_dense(_random_symmetric(rng, 60), 3)
        banded = trace_powers(S, 6)
        reference = np.linalg.eigvalsh(S.to_dense())
        spectral = power_sums(reference, 6)
        # odd powers cancel, so compare against the sum of |lambda|^l
        ok = bool(np.all(np.abs(banded - spectral) <= 1e-9 * power_sums(np.abs(reference), 6)))
        return self.verification.verify_true(ok, "trace powers"), "l <= 6, p = 60, d = 3"

    # ============================================
    # Full checks
    # ============================================

    def check_degree_factor_ratio(self) -> CheckOutcome:
        for D in range(2, 6):
            c = moments.degree_factor(D).value
            deviations = []
            for d in (10 ** 2, 10 ** 3, 10 ** 4):
                count = combinatorics.count_restricted_compositions(D * d, D, 2 * d)
                deviations.append(abs(float(Fraction(count) / (c * d ** (D - 1))) - 1.0))
            if deviations[-1] > 0.01 or not self.verification.verify_decreasing(deviations, f"c_{D} ratio"):
                return False, f"D={D}: deviations {deviations}"
        return True, "D = 2..5, d up to 10^4"

    def check_leading_term(self) -> CheckOutcome:
        n = 3
        profile = DegreeProfile.of([2])
        for p in (60, 120):
            deviations = []
            for d in (3, 6, 12):
                count = oracle.brute_count_banded_trees(p, n, d, 2).count(profile)
                exact = n * (2 * d * p - d * (d + 1))
                if count != exact:
                    return False, f"p={p}, d={d}: census {count}, closed form {exact}"
                leading = moments.banded_class_size_leading(p, n, d, profile, 1)
                deviation = abs(count / leading - 1.0)
                if deviation > 2.0 * (1.0 / d + d / p):
                    return False, f"p={p}, d={d}: deviation {deviation:.4f}"
                deviations.append(deviation)
            if p == 120 and not self.verification.verify_decreasing(deviations, "leading-term deviation"):
                return False, f"p={p}: deviations {deviations} not decreasing"
        return True, "profile {2}, n = 3"

    def check_unbanded_census(self) -> CheckOutcome:
        for p, n, l in ((3, 3, 2), (3, 2, 3), (4, 2, 2)):
            census = oracle.brute_count_banded_trees(p, n, p - 1, l)
            expected = combinatorics.count_ordered_trees_by_r(p, n, l)
            if census.by_r() != expected:
                return False, f"(p,n,l)=({p},{n},{l}): census {census.by_r()}, expected {expected}"
        return True, "d >= p - 1"

    def check_ensemble(self) -> CheckOutcome:
        from src.project.spectra.simulate import SimulationConfig, run_ensemble, summarize

        config = SimulationConfig(p=400, n=200, d=20, distribution=EntryDistribution.NORMAL,
                                  replicates=3, seed=self.seed)
        summary = summarize(run_ensemble(config, max_order=2, workers=1))
        expected = float(_gram_second_moment(config.p, config.n, config.d, Fraction(3)))
        first = self.verification.verify_close(summary.mean_moments[0], 1.0, abs_tol=3.0 / math.sqrt(400 * 3),
                                               message="ensemble m_1")
        second = self.verification.verify_close(summary.mean_moments[1], expected, rel_tol=0.02,
                                                message="ensemble m_2")
        return first and second, f"m_1 = {summary.mean_moments[0]:.4f}, m_2 = {summary.mean_moments[1]:.4f} vs {expected:.4f}"


def _random_symmetric(rng: np.random.Generator, p: int) -> np.ndarray:
    A = rng.standard_normal((p, p))
    return (A + A.T) / 2.0
