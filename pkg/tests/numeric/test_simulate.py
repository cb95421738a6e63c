"""
Test Suite for Monte Carlo ensembles
Reproducibility, histogram normalization, summaries and moment convergence
"""
from fractions import Fraction

import allure
import numpy as np
import pytest

from src.core.errors import BudgetExceededError, ConvergenceError, NoEigenvalueDataError
from src.core.sampling.entry_distribution import EntryDistribution
from src.core.sampling.stream_factory import StreamFactory
from src.project.spectra import moments, simulate
from src.project.spectra.simulate import SimulationConfig, SpectralSample


def _sample_with_eigenvalues(config, index, values):
    values = np.asarray(values, dtype=np.float64)
    return SpectralSample(config, index, np.array([values.mean()]), np.sort(values))


class TestSimulationConfig:
    """Validated ensemble parameters"""

    @allure.feature("Simulation")
    @allure.story("Configuration")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: configuration")
    def test_ratios_and_metadata(self):
        config = SimulationConfig(p=100, n=40, d=10, distribution="rademacher", replicates=3, seed=9)

        with allure.step("gamma = d/n, y = 2d/n"):
            assert config.gamma == Fraction(1, 4)
            assert config.y == Fraction(1, 2)
            assert config.distribution is EntryDistribution.RADEMACHER
            assert config.workload == 100 * 10 * 40 * 3

        with allure.step("Metadata carried into every output file"):
            assert config.metadata() == {'p': 100, 'n': 40, 'd': 10, 'gamma': 0.25, 'y': 0.5,
                                         'distribution': 'rademacher', 'seed': 9, 'reps': 3}

    @allure.feature("Simulation")
    @allure.story("Configuration")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.numeric
    @allure.suite("Simulation: configuration")
    def test_invalid_parameters_and_presets(self):
        with allure.step("Out-of-range values"):
            for kwargs in ({'p': 0, 'n': 5, 'd': 0}, {'p': 5, 'n': 5, 'd': 6},
                           {'p': 5, 'n': 5, 'd': -1}, {'p': 5, 'n': 5, 'd': 1, 'seed': -1},
                           {'p': 5, 'n': 5, 'd': 1, 'replicates': 0},
                           {'p': 5, 'n': 5, 'd': 1, 'distribution': 'cauchy'}):
                with pytest.raises(ValueError):
                    SimulationConfig(**kwargs)

        with allure.step("Presets come from config.yaml and accept overrides"):
            config = SimulationConfig.from_preset("narrow_band", replicates=2, seed=None)
            assert (config.p, config.n, config.d, config.replicates) == (1000, 360, 60, 2)
            with pytest.raises(ValueError):
                SimulationConfig.from_preset("missing")


class TestEnsemble:
    """run_ensemble determinism and contents"""

    @allure.feature("Simulation")
    @allure.story("Reproducibility")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.numeric
    @pytest.mark.smoke
    @allure.suite("Simulation: ensembles")
    def test_bit_identical_across_runs_and_workers(self):
        config = SimulationConfig(p=60, n=30, d=4, distribution="normal", replicates=4, seed=2024)

        with allure.step("Sequential run twice"):
            first = simulate.run_ensemble(config, max_order=4, want_eigenvalues=True, workers=1)
            second = simulate.run_ensemble(config, max_order=4, want_eigenvalues=True, workers=1)

        with allure.step("Threaded run"):
            threaded = simulate.run_ensemble(config, max_order=4, want_eigenvalues=True, workers=3)

        with allure.step("Moments and spectra agree bit for bit"):
            for a, b, c in zip(first, second, threaded):
                assert a.replicate_index == b.replicate_index == c.replicate_index
                np.testing.assert_array_equal(a.empirical_moments, b.empirical_moments)
                np.testing.assert_array_equal(a.empirical_moments, c.empirical_moments)
                np.testing.assert_array_equal(a.eigenvalues, c.eigenvalues)
            assert [s.replicate_index for s in threaded] == [0, 1, 2, 3]

    @allure.feature("Simulation")
    @allure.story("Reproducibility")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: ensembles")
    def test_workers_reach_the_gram_product(self, monkeypatch):
        calls = []
        original = simulate.banded_gram

        def recording_gram(X, d, workers=1):
            calls.append(workers)
            return original(X, d, workers=workers)

        monkeypatch.setattr(simulate, "banded_gram", recording_gram)
        # p above one row block, so the threaded Gram path really splits
        single = SimulationConfig(p=600, n=20, d=3, distribution="normal", replicates=1, seed=11)

        with allure.step("One replicate: the Gram product gets every worker"):
            threaded = simulate.run_ensemble(single, max_order=3, workers=3)
            assert calls == [3]

        with allure.step("Same moments as a single-threaded Gram product"):
            serial = simulate.run_ensemble(single, max_order=3, workers=1)
            np.testing.assert_array_equal(threaded[0].empirical_moments, serial[0].empirical_moments)

        with allure.step("Several replicates: threads go to replicates, the Gram product runs serially"):
            calls.clear()
            simulate.run_ensemble(SimulationConfig(p=40, n=20, d=2, replicates=3, seed=11), max_order=2, workers=2)
            assert calls == [1, 1, 1]

    @allure.feature("Simulation")
    @allure.story("Reproducibility")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: ensembles")
    def test_replicate_streams(self):
        config = SimulationConfig(p=20, n=10, d=2, seed=77, replicates=3)

        with allure.step("Replicate data depends only on (seed, index)"):
            np.testing.assert_array_equal(simulate.generate(config, 2), simulate.generate(config, 2))
            assert not np.array_equal(simulate.generate(config, 0), simulate.generate(config, 1))

        with allure.step("Data and probe streams are distinct"):
            factory = StreamFactory(77)
            data = factory.generator(0, simulate.DATA_STREAM).standard_normal(8)
            probe = factory.generator(0, simulate.PROBE_STREAM).standard_normal(8)
            assert not np.array_equal(data, probe)

        with allure.step("Seeds outside 64 bits are refused"):
            with pytest.raises(ValueError):
                StreamFactory(2 ** 64)

    @allure.feature("Simulation")
    @allure.story("Ensemble contents")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: ensembles")
    def test_moments_match_eigenvalues_and_estimates(self):
        config = SimulationConfig(p=50, n=25, d=3, distribution="uniform", replicates=2, seed=5)

        with allure.step("Banded trace route agrees with the eigenvalue power sums"):
            with_spectrum = simulate.run_ensemble(config, max_order=3, want_eigenvalues=True, workers=1)
            for sample in with_spectrum:
                power = np.array([np.mean(sample.eigenvalues ** l) for l in (1, 2, 3)])
                np.testing.assert_allclose(sample.empirical_moments, power, rtol=1e-9)
                assert sample.min_eigenvalue == sample.eigenvalues[0]
                assert sample.max_order == 3

        with allure.step("Hutchinson estimates are attached per order"):
            estimated = simulate.run_ensemble(config, max_order=2, workers=1, hutchinson_probes=50)
            for sample in estimated:
                assert sample.eigenvalues is None
                assert [e.probes for e in sample.trace_estimates] == [50, 50]
            again = simulate.run_ensemble(config, max_order=2, workers=1, hutchinson_probes=50)
            assert estimated[1].trace_estimates == again[1].trace_estimates

    @allure.feature("Simulation")
    @allure.story("Failures")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: ensembles")
    def test_budget_and_convergence_failures(self, monkeypatch):
        with allure.step("Workload above the ensemble budget"):
            huge = SimulationConfig(p=100_000, n=100_000, d=10_000)
            with pytest.raises(BudgetExceededError) as error:
                simulate.run_ensemble(huge, max_order=2)
            assert error.value.kind == "ensemble"

        with allure.step("A non-converging replicate is reported with its index"):
            def fail(S, backend=None):
                raise ConvergenceError(4, 50)

            monkeypatch.setattr(simulate, "eigenvalues", fail)
            config = SimulationConfig(p=10, n=10, d=1, replicates=2, seed=1)
            with pytest.raises(ConvergenceError) as error:
                simulate.run_ensemble(config, max_order=2, want_eigenvalues=True, workers=1)
            assert error.value.replicate_index == 0
            assert error.value.index == 4


class TestStatistics:
    """Histogram and replicate summary"""

    @allure.feature("Simulation")
    @allure.story("Histogram")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: statistics")
    def test_histogram_densities(self):
        config = SimulationConfig(p=4, n=4, d=1)
        samples = [_sample_with_eigenvalues(config, 0, [0.0, 0.0, 1.0, 1.0])]

        with allure.step("Two bins on [0, 1]"):
            hist = simulate.histogram(samples, bins=2, value_range=(0.0, 1.0))
            np.testing.assert_allclose(hist.densities, [1.0, 1.0])
            np.testing.assert_allclose(hist.centers, [0.25, 0.75])
            assert hist.total_mass() == pytest.approx(1.0)

        with allure.step("A single bin has density 1 / width"):
            hist = simulate.histogram(samples, bins=1, value_range=(0.0, 2.0))
            np.testing.assert_allclose(hist.densities, [0.5])

        with allure.step("Pooling over replicates"):
            samples.append(_sample_with_eigenvalues(config, 1, [3.0, 3.0, 3.0, 3.0]))
            assert simulate.pooled_eigenvalues(samples).size == 8
            assert simulate.histogram(samples, bins=7).total_mass() == pytest.approx(1.0)

    @allure.feature("Simulation")
    @allure.story("Histogram")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.numeric
    @allure.suite("Simulation: statistics")
    def test_histogram_needs_eigenvalues(self):
        config = SimulationConfig(p=4, n=4, d=1)
        with allure.step("Samples without spectra"):
            with pytest.raises(NoEigenvalueDataError):
                simulate.histogram([SpectralSample(config, 0, np.ones(2))], bins=3)

        with allure.step("Non-positive bin count"):
            with pytest.raises(ValueError):
                simulate.histogram([_sample_with_eigenvalues(config, 0, [1.0, 2.0])], bins=0)

    @allure.feature("Simulation")
    @allure.story("Summary")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: statistics")
    def test_summarize(self):
        config = SimulationConfig(p=2, n=2, d=1)
        samples = [
            SpectralSample(config, 0, np.array([1.0, 2.0]), np.array([0.0, 1.0])),
            SpectralSample(config, 1, np.array([3.0, 4.0]), np.array([0.0, 2.0])),
        ]

        with allure.step("Replicate mean, standard error and extreme eigenvalues"):
            summary = simulate.summarize(samples)
            np.testing.assert_allclose(summary.mean_moments, [2.0, 3.0])
            np.testing.assert_allclose(summary.standard_errors, [1.0, 1.0])
            assert (summary.min_eigenvalue, summary.max_eigenvalue) == (0.0, 2.0)
            assert summary.replicate_kolmogorov == pytest.approx(0.5)

        with allure.step("A single replicate has zero standard error and no spread"):
            single = simulate.summarize(samples[:1])
            np.testing.assert_array_equal(single.standard_errors, [0.0, 0.0])
            assert single.replicate_kolmogorov is None

        with allure.step("No samples"):
            with pytest.raises(ValueError):
                simulate.summarize([])


class TestMomentConvergence:
    """Empirical moments approach the limiting polynomials"""

    @allure.feature("Simulation")
    @allure.story("Convergence")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.numeric
    @allure.suite("Simulation: convergence")
    def test_second_moment_matches_finite_size_formula(self):
        config = SimulationConfig(p=300, n=150, d=15, distribution="rademacher", replicates=4, seed=31)
        pairs = 2 * config.d * config.p - config.d * (config.d + 1)
        expected = (config.p * (1 + config.n - 1) / config.n + pairs / config.n) / config.p

        with allure.step("Ensemble mean of m_1 and m_2"):
            summary = simulate.summarize(simulate.run_ensemble(config, max_order=2, workers=1))
            allure.attach(str(summary.mean_moments), name="Mean moments", attachment_type=allure.attachment_type.TEXT)
            # Rademacher diagonal entries are exactly 1
            assert summary.mean_moments[0] == pytest.approx(1.0, abs=1e-12)
            assert summary.mean_moments[1] == pytest.approx(expected, rel=0.02)

    @allure.feature("Simulation")
    @allure.story("Convergence")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @pytest.mark.slow
    @allure.suite("Simulation: convergence")
    def test_moments_shrink_toward_gamma_polynomials(self):
        theory = [moments.limit_moment_polynomial(l) for l in (2, 3, 4)]
        errors = []
        # gamma stays at 1/10 while d/p and 1/n both shrink
        for p, n, d in ((400, 200, 20), (3200, 800, 80)):
            config = SimulationConfig(p=p, n=n, d=d, distribution="normal", replicates=2, seed=8)
            with allure.step(f"p={config.p}, n={config.n}, d={config.d}"):
                summary = simulate.summarize(simulate.run_ensemble(config, max_order=4))
                gamma = config.gamma
                error = max(abs(summary.mean_moments[l - 1] - float(poly.evaluate(gamma))) / float(poly.evaluate(gamma))
                            for l, poly in zip((2, 3, 4), theory))
                y_error = abs(summary.mean_moments[1] - float(theory[0].evaluate_y_convention(gamma)))
                assert abs(summary.mean_moments[1] - float(theory[0].evaluate(gamma))) < y_error
                errors.append(error)
        allure.attach(str(errors), name="Relative errors", attachment_type=allure.attachment_type.TEXT)
        assert errors[1] < errors[0]


class TestDeskScaleEnsembles:
    """Preset ensembles against the limiting moments and the support bound"""

    @allure.feature("Simulation")
    @allure.story("Desk scale")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.numeric
    @pytest.mark.slow
    @allure.suite("Simulation: desk scale")
    def test_convergence_preset(self):
        config = SimulationConfig.from_preset("convergence", distribution="normal", replicates=5, seed=2024)

        with allure.step(f"{config.replicates} replicates at p={config.p}, n={config.n}, d={config.d}"):
            summary = simulate.summarize(simulate.run_ensemble(config, max_order=4, want_eigenvalues=True))
            allure.attach(f"moments={list(summary.mean_moments)}\nlambda_min={summary.min_eigenvalue}\n"
                          f"lambda_max={summary.max_eigenvalue}\nreplicate_kolmogorov={summary.replicate_kolmogorov}",
                          name="Summary", attachment_type=allure.attachment_type.TEXT)

        with allure.step("Mean m_l within 3% of the gamma = 1/10 polynomials"):
            for l in range(1, 5):
                expected = float(moments.limit_moment_value(l, config.gamma))
                assert summary.mean_moments[l - 1] == pytest.approx(expected, rel=0.03), f"m_{l}"

        with allure.step("Largest eigenvalue below 1.15 (1 + sqrt(y))^2"):
            assert summary.max_eigenvalue <= 1.15 * moments.support_bound(float(config.y))

        with allure.step("Two replicate spectra are close in Kolmogorov distance"):
            assert summary.replicate_kolmogorov <= 0.05

    @allure.feature("Simulation")
    @allure.story("Desk scale")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.numeric
    @pytest.mark.slow
    @allure.suite("Simulation: desk scale")
    @pytest.mark.parametrize("preset", ["narrow_band", "wide_band"])
    def test_histogram_moments(self, preset):
        config = SimulationConfig.from_preset(preset, replicates=2, seed=7)
        allure.dynamic.title(f"Histogram moments: {preset} (gamma = {config.gamma})")

        with allure.step("Moments of the pooled eigenvalue histogram"):
            samples = simulate.run_ensemble(config, max_order=4, want_eigenvalues=True)
            histogram = simulate.histogram(samples)
            widths = np.diff(histogram.edges)
            for l in range(1, 5):
                empirical = float(np.sum(histogram.densities * widths * histogram.centers ** l))
                expected = float(moments.limit_moment_value(l, config.gamma))
                assert empirical == pytest.approx(expected, rel=0.05), f"m_{l}"
