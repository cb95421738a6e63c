"""
Test Suite for distances between spectral distributions and the moment report
"""
from fractions import Fraction

import allure
import numpy as np
import pytest

from src.project.spectra import metrics, moments
from src.project.spectra.metrics import StepCDF


def _cdf(side: dict) -> StepCDF:
    if "point_mass" in side:
        return StepCDF.point_mass(side["point_mass"])
    return StepCDF.from_sample(side["sample"])


class TestStepCDF:
    """Construction and evaluation of right-continuous step CDFs"""

    @allure.feature("Metrics")
    @allure.story("Step CDF")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.exact
    @allure.suite("Metrics: step CDF")
    def test_empirical_cdf_values(self):
        F = StepCDF.from_sample([1.0, 0.0, 1.0, 3.0])

        with allure.step("Ties merge into one jump"):
            np.testing.assert_array_equal(F.locations, [0.0, 1.0, 3.0])
            np.testing.assert_allclose(F.cumulative, [0.25, 0.75, 1.0])

        with allure.step("Right-continuous values and left limits"):
            np.testing.assert_allclose(F([-1.0, 0.0, 0.5, 1.0, 3.0, 9.0]), [0.0, 0.25, 0.25, 0.75, 1.0, 1.0])
            np.testing.assert_allclose(F.left_limit([0.0, 1.0, 3.0]), [0.0, 0.25, 0.75])

    @allure.feature("Metrics")
    @allure.story("Step CDF")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.exact
    @allure.suite("Metrics: step CDF")
    def test_weighted_cdf_is_normalized(self):
        with allure.step("Repeated locations add their weights"):
            F = StepCDF.from_weights([1.0, 0.0, 1.0], [1.0, 1.0, 2.0])
            np.testing.assert_array_equal(F.locations, [0.0, 1.0])
            np.testing.assert_allclose(F.cumulative, [0.25, 1.0])

        with allure.step("Negative or zero total weight is refused"):
            with pytest.raises(ValueError):
                StepCDF.from_weights([0.0, 1.0], [1.0, -1.0])
            with pytest.raises(ValueError):
                StepCDF.from_weights([0.0], [0.0])

    @allure.feature("Metrics")
    @allure.story("Step CDF")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.exact
    @allure.suite("Metrics: step CDF")
    def test_invalid_cdf(self, invalid_cdf_cases):
        data = invalid_cdf_cases
        allure.dynamic.title(f"Invalid step CDF: {data['test_id']}")

        with allure.step("Construction fails"):
            with pytest.raises(ValueError):
                StepCDF(np.array(data["locations"], dtype=float), np.array(data["cumulative"], dtype=float))


class TestDistances:
    """Kolmogorov and Levy distances from the jump sets"""

    @allure.feature("Metrics")
    @allure.story("Distances")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.exact
    @pytest.mark.smoke
    @allure.suite("Metrics: distances")
    def test_distances(self, distance_cases):
        data = distance_cases
        allure.dynamic.title(data.get("test_name", data["test_id"]))
        F, G = _cdf(data["first"]), _cdf(data["second"])

        with allure.step("Kolmogorov distance"):
            assert metrics.kolmogorov_distance(F, G) == pytest.approx(data["kolmogorov"], abs=1e-12)

        with allure.step("Levy distance in both orders"):
            assert metrics.levy_distance(F, G) == pytest.approx(data["levy"], abs=1e-9)
            assert metrics.levy_distance(G, F) == pytest.approx(data["levy"], abs=1e-9)

    @allure.feature("Metrics")
    @allure.story("Distances")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.exact
    @allure.suite("Metrics: distances")
    def test_levy_bounded_by_kolmogorov(self, rng):
        with allure.step("0 <= Levy <= Kolmogorov <= 1 on random samples"):
            for _ in range(1000):
                F = StepCDF.from_sample(rng.normal(size=int(rng.integers(1, 12))))
                G = StepCDF.from_sample(rng.normal(size=int(rng.integers(1, 12))))
                levy = metrics.levy_distance(F, G)
                kolmogorov = metrics.kolmogorov_distance(F, G)
                assert 0.0 <= levy <= kolmogorov + 1e-12
                assert kolmogorov <= 1.0

        with allure.step("The sandwich holds at the computed distance"):
            assert metrics.levy_sandwich_holds(F, G, levy)

    @allure.feature("Metrics")
    @allure.story("Distances")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.exact
    @allure.suite("Metrics: distances")
    @pytest.mark.parametrize("distance", [metrics.kolmogorov_distance, metrics.levy_distance],
                             ids=["kolmogorov", "levy"])
    def test_symmetry_and_triangle_inequality(self, rng, distance):
        def random_cdf():
            # rounding makes shared jump locations likely
            return StepCDF.from_sample(np.round(rng.normal(size=int(rng.integers(1, 10))), 1))

        with allure.step("d(F, G) == d(G, F) and d(F, H) <= d(F, G) + d(G, H) on 500 random triples"):
            for _ in range(500):
                F, G, H = random_cdf(), random_cdf(), random_cdf()
                assert distance(F, G) == pytest.approx(distance(G, F), abs=1e-10)
                assert distance(F, H) <= distance(F, G) + distance(G, H) + 1e-10
                assert distance(F, F) == 0.0


class TestMomentReport:
    """Empirical moments against both conventions"""

    @allure.feature("Metrics")
    @allure.story("Moment report")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.exact
    @allure.suite("Metrics: moment report")
    def test_moment_report_rows(self):
        theory = [moments.limit_moment_polynomial(l) for l in (1, 2, 3)]

        with allure.step("Empirical values close to the gamma convention"):
            rows = metrics.moment_report([1.0, 2.1, 4.6], theory, Fraction(1, 2))
            assert [row.order for row in rows] == [1, 2, 3]
            assert [row.theory_gamma for row in rows] == [1.0, 2.0, 4.75]
            assert [row.theory_y for row in rows] == [1.0, 3.0, 10.0]
            assert rows[0].preferred == "tie"
            assert rows[1].preferred == "gamma"
            assert rows[1].relative_error_gamma == pytest.approx(0.05)
            assert rows[2].as_dict()["preferred"] == "gamma"

        with allure.step("Mismatched inputs are refused"):
            with pytest.raises(ValueError):
                metrics.moment_report([1.0, 2.0], theory, Fraction(1, 2))
            with pytest.raises(ValueError):
                metrics.moment_report([1.0, 2.0], theory[1:], Fraction(1, 2))
