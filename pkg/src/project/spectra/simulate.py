"""
Monte Carlo ensembles of banded sample covariance matrices.
"""
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.core.errors import BudgetExceededError, ConvergenceError, NoEigenvalueDataError
from src.core.sampling.entry_distribution import EntryDistribution
from src.core.sampling.stream_factory import StreamFactory
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.project.spectra import metrics
from src.project.spectra.linalg.banded import banded_gram, power_sums, trace_powers
from src.project.spectra.linalg.eigensolver import eigenvalues
from src.project.spectra.linalg.trace_estimation import TraceEstimate, hutchinson_trace

logger = ReportLogger()

DATA_STREAM = 0
PROBE_STREAM = 1


@dataclass(frozen=True)
class SimulationConfig:
    p: int
    n: int
    d: int
    distribution: EntryDistribution = EntryDistribution.NORMAL
    replicates: int = 1
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.distribution, str):
            object.__setattr__(self, 'distribution', EntryDistribution.get_distribution(self.distribution))
        if self.p < 1 or self.n < 1 or self.replicates < 1:
            raise ValueError(f"p, n and replicates must be positive: {self}")
        if not 0 <= self.d <= self.p:
            raise ValueError(f"half-bandwidth must satisfy 0 <= d <= p, got d={self.d}, p={self.p}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.d, self.n)

    @property
    def y(self) -> Fraction:
        return Fraction(2 * self.d, self.n)

    @property
    def workload(self) -> int:
        return self.p * max(self.d, 1) * self.n * self.replicates

    def metadata(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'n': self.n,
            'd': self.d,
            'gamma': float(self.gamma),
            'y': float(self.y),
            'distribution': self.distribution.value,
            'seed': self.seed,
            'reps': self.replicates,
        }

    @classmethod
    def from_preset(cls, name: str, **overrides) -> 'SimulationConfig':
        values = ConfigManager().get_preset(name)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def __str__(self) -> str:
        return (f"p={self.p}, n={self.n}, d={self.d}, dist={self.distribution.value}, "
                f"reps={self.replicates}, seed={self.seed}")


@dataclass
class SpectralSample:
    """One replicate: normalized moments m_l = tr(S^l)/p, optional eigenvalues."""

    config: SimulationConfig
    replicate_index: int
    empirical_moments: np.ndarray
    eigenvalues: Optional[np.ndarray] = None
    trace_estimates: List[TraceEstimate] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def max_order(self) -> int:
        return len(self.empirical_moments)

    @property
    def min_eigenvalue(self) -> Optional[float]:
        return None if self.eigenvalues is None else float(self.eigenvalues[0])

    @property
    def max_eigenvalue(self) -> Optional[float]:
        return None if self.eigenvalues is None else float(self.eigenvalues[-1])


def generate(config: SimulationConfig, replicate_index: int) -> np.ndarray:
    """The p x n data matrix of one replicate; depends only on (seed, replicate_index)."""
    rng = StreamFactory(config.seed).generator(replicate_index, DATA_STREAM)
    return config.distribution.sample(rng, (config.p, config.n))


def _run_replicate(config: SimulationConfig, index: int, max_order: int, want_eigenvalues: bool,
                   hutchinson_probes: int, backend: Optional[str], gram_workers: int = 1) -> SpectralSample:
    started = time.perf_counter()
    S = banded_gram(generate(config, index), config.d, workers=gram_workers)
    try:
        spectrum = eigenvalues(S, backend=backend) if want_eigenvalues else None
        if spectrum is not None and max_order * S.half_bandwidth >= S.dimension:
            traces = power_sums(spectrum, max_order)
        else:
            traces = trace_powers(S, max_order)
    except ConvergenceError as e:
        logger.log_error(e, f"replicate {index}")
        raise e.with_replicate(index) from e

    estimates = []
    if hutchinson_probes:
        probe_seed = int(StreamFactory(config.seed).generator(index, PROBE_STREAM).integers(0, 2 ** 63))
        estimates = [hutchinson_trace(S, l, hutchinson_probes, probe_seed) for l in range(1, max_order + 1)]

    elapsed = time.perf_counter() - started
    logger.log_replicate(index, elapsed)
    return SpectralSample(config, index, traces / config.p, spectrum, estimates, elapsed)


def run_ensemble(config: SimulationConfig, max_order: Optional[int] = None, want_eigenvalues: bool = False,
                 workers: Optional[int] = None, hutchinson_probes: int = 0,
                 backend: Optional[str] = None) -> List[SpectralSample]:
    """One SpectralSample per replicate, ordered by replicate index."""
    config_manager = ConfigManager()
    max_order = config_manager.get_max_order() if max_order is None else max_order
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    if hutchinson_probes and hutchinson_probes < 2:
        raise ValueError(f"hutchinson probes must be >= 2, got {hutchinson_probes}")
    cap = config_manager.get_ensemble_budget()
    if config.workload > cap:
        logger.log_budget("ensemble", config.workload, cap)
        raise BudgetExceededError("ensemble", config.workload, cap)

    workers = config_manager.get_parallel_workers() if workers is None else max(1, workers)
    logger.log_ensemble_start(config)
    indices = range(config.replicates)
    if workers > 1 and config.replicates > 1:
        return Parallel(n_jobs=workers, prefer="threads")(
            delayed(_run_replicate)(config, i, max_order, want_eigenvalues, hutchinson_probes, backend)
            for i in indices
        )
    # serial replicates: the threads go to the Gram product
    return [_run_replicate(config, i, max_order, want_eigenvalues, hutchinson_probes, backend, workers)
            for i in indices]


# ============================================
# Statistics
# ============================================

@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    densities: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def total_mass(self) -> float:
        return float(np.sum(self.densities * np.diff(self.edges)))


def pooled_eigenvalues(samples: Sequence[SpectralSample]) -> np.ndarray:
    spectra = [s.eigenvalues for s in samples if s.eigenvalues is not None]
    if not spectra:
        raise NoEigenvalueDataError("none of the samples carries eigenvalues")
    return np.concatenate(spectra)


def histogram(samples: Sequence[SpectralSample], bins: Optional[int] = None,
              value_range: Optional[tuple] = None) -> Histogram:
    """Density-normalized histogram of the eigenvalues pooled over replicates."""
    values = pooled_eigenvalues(samples)
    bins = ConfigManager().get_histogram_bins() if bins is None else bins
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    densities, edges = np.histogram(values, bins=bins, range=value_range, density=True)
    return Histogram(edges, densities)


@dataclass(frozen=True)
class EnsembleSummary:
    mean_moments: np.ndarray
    standard_errors: np.ndarray
    min_eigenvalue: Optional[float]
    max_eigenvalue: Optional[float]
    replicate_kolmogorov: Optional[float]


def summarize(samples: Sequence[SpectralSample]) -> EnsembleSummary:
    """Replicate-averaged moments, pooled extreme eigenvalues, spread between two replicates."""
    if not samples:
        raise ValueError("no samples to summarize")
    moments = np.vstack([s.empirical_moments for s in samples])
    errors = moments.std(axis=0, ddof=1) / np.sqrt(len(samples)) if len(samples) > 1 else np.zeros(moments.shape[1])
    with_spectrum = [s for s in samples if s.eigenvalues is not None]
    low = min(s.min_eigenvalue for s in with_spectrum) if with_spectrum else None
    high = max(s.max_eigenvalue for s in with_spectrum) if with_spectrum else None
    spread = None
    if len(with_spectrum) >= 2:
        spread = metrics.kolmogorov_distance(metrics.StepCDF.from_sample(with_spectrum[0].eigenvalues),
                                             metrics.StepCDF.from_sample(with_spectrum[1].eigenvalues))
    return EnsembleSummary(moments.mean(axis=0), errors, low, high, spread)
