"""
Monte Carlo estimation of empirical size and power.

Replication r of a cell draws from its own substream, keyed by
(seed, *stream, r), so a cell is a pure function of its configuration no
matter how replications are spread over workers.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from rankbreak.common.errors import DegenerateDataError, InvalidArgumentError
from rankbreak.simulate.generators import (
    Ar1Config,
    FgnConfig,
    gen_ar1_changepoint,
    gen_fgn,
    inject_outliers,
)
from rankbreak.testing.procedure import Procedure
from rankbreak.testing.procedures import build_procedure
from rankbreak.variance import RhoSource, VarianceConfig, VarianceKind, robust_acf1, sample_acf1

logger = logging.getLogger(__name__)

ACCEPT = 0
REJECT = 1
FAILED = -1

CHUNKS_PER_WORKER = 4


def default_variance_config(procedure: Procedure, outliers: bool) -> VarianceConfig:
    """
    Carlstein estimators for both tests; the block length uses the robust
    autocorrelation estimate when the data carry outliers.
    """
    kind = VarianceKind.CARLSTEIN_W if procedure is Procedure.WILCOXON else VarianceKind.CARLSTEIN_C
    rho_source = RhoSource.ROBUST_Q if outliers else RhoSource.SAMPLE_ACF
    return VarianceConfig(kind=kind, rho_source=rho_source)


@dataclass(frozen=True)
class McConfig:
    """
    One Monte Carlo experiment.

    Attributes:
        dgp: The data-generating process.
        replications: Number of simulated series.
        alpha: Significance level of every test.
        seed: Base seed (unsigned 64-bit).
        outliers: Whether to contaminate each series with four outliers.
        tests: Procedures to run on every series.
        variance_configs: Per-procedure overrides of default_variance_config.
        stream: Extra substream key, so cells sharing a seed stay independent.
    """
    dgp: Ar1Config | FgnConfig
    replications: int = 10_000
    alpha: float = 0.05
    seed: int = 0
    outliers: bool = False
    tests: tuple[Procedure, ...] = (Procedure.CUSUM, Procedure.WILCOXON)
    variance_configs: dict[Procedure, VarianceConfig] = field(default_factory=dict)
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidArgumentError(f"replications must be at least 1, got {self.replications}")
        if not 0 < self.alpha < 1:
            raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not self.tests:
            raise InvalidArgumentError("at least one test must be configured")

    def variance_config(self, procedure: Procedure) -> VarianceConfig:
        return self.variance_configs.get(procedure) or default_variance_config(procedure, self.outliers)

    def as_dict(self) -> dict:
        return {
            'dgp': self.dgp.as_dict(),
            'replications': self.replications,
            'alpha': self.alpha,
            'seed': self.seed,
            'outliers': self.outliers,
            'tests': [procedure.value for procedure in self.tests],
            'variance': {procedure.value: self.variance_config(procedure).as_dict() for procedure in self.tests},
            'stream': list(self.stream),
        }


@dataclass(frozen=True)
class TestTally:
    """Outcome counts of one procedure over the replications of a cell."""
    __test__ = False  # keeps pytest from collecting this class

    rejections: int
    failures: int
    replications: int

    @property
    def replications_used(self) -> int:
        """Replications that produced a verdict; failed ones are excluded."""
        return self.replications - self.failures

    @property
    def rejection_rate(self) -> float:
        if self.replications_used == 0:
            return math.nan
        return self.rejections / self.replications_used


@dataclass(frozen=True)
class McCell:
    """Result of one Monte Carlo experiment, broken down per procedure."""
    config: McConfig
    tallies: dict[Procedure, TestTally]

    def rejection_rate(self, procedure: Procedure) -> float:
        return self.tallies[procedure].rejection_rate

    def replications_used(self, procedure: Procedure) -> int:
        return self.tallies[procedure].replications_used


def replication_rng(seed: int, stream: tuple[int, ...], replication: int) -> np.random.Generator:
    """Independent generator for one replication."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(*stream, replication)))


def generate_series(dgp: Ar1Config | FgnConfig, rng: np.random.Generator, outliers: bool) -> np.ndarray:
    if isinstance(dgp, Ar1Config):
        x = gen_ar1_changepoint(dgp, rng)
    elif isinstance(dgp, FgnConfig):
        x = gen_fgn(dgp, rng)
    else:
        raise InvalidArgumentError(f"unknown data-generating process {type(dgp).__name__}")
    return inject_outliers(x) if outliers else x


def _run_chunk(cfg: McConfig, start: int, stop: int) -> np.ndarray:
    """Outcome codes for replications start..stop-1 (1-based replication numbers)."""
    procedures = [build_procedure(procedure, cfg.variance_config(procedure)) for procedure in cfg.tests]
    outcomes = np.empty((stop - start, len(procedures)), dtype=np.int8)

    for row, replication in enumerate(range(start, stop)):
        x = generate_series(cfg.dgp, replication_rng(cfg.seed, cfg.stream, replication), cfg.outliers)
        for col, procedure in enumerate(procedures):
            try:
                report = procedure.run(x, cfg.alpha)
                outcomes[row, col] = REJECT if report.reject else ACCEPT
            except DegenerateDataError as e:
                logger.debug(f"Replication {replication} failed for {procedure.procedure.value}: {e}")
                outcomes[row, col] = FAILED
    return outcomes


def _chunk_bounds(replications: int, workers: int) -> list[tuple[int, int]]:
    n_chunks = max(1, min(replications, workers * CHUNKS_PER_WORKER))
    edges = np.linspace(1, replications + 1, n_chunks + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def _map_chunks(function, cfg, bounds: list[tuple[int, int]], workers: int) -> list:
    if workers <= 1 or len(bounds) == 1:
        return [function(cfg, lo, hi) for lo, hi in bounds]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(function, cfg, lo, hi) for lo, hi in bounds]
        # Collected in submission order, whatever order they finish in.
        return [future.result() for future in futures]


def run_mc(cfg: McConfig, workers: int = 1) -> McCell:
    """
    Runs a Monte Carlo experiment.

    Degenerate-data errors in a replication are tallied as failures and left
    out of the rejection-rate denominator; they never count as rejections.

    Args:
        cfg (McConfig): The experiment.
        workers (int): Worker processes; has no influence on the result.

    Returns:
        McCell: Rejection counts and rates per procedure.
    """
    started = time.perf_counter()
    logger.info(f"Monte Carlo cell {cfg.dgp.as_dict()} outliers={cfg.outliers} "
                f"reps={cfg.replications} workers={workers}")

    bounds = _chunk_bounds(cfg.replications, max(1, workers))
    outcomes = np.concatenate(_map_chunks(_run_chunk, cfg, bounds, workers), axis=0)

    tallies = {}
    for col, procedure in enumerate(cfg.tests):
        column = outcomes[:, col]
        tallies[procedure] = TestTally(
            rejections=int(np.count_nonzero(column == REJECT)),
            failures=int(np.count_nonzero(column == FAILED)),
            replications=cfg.replications,
        )
        if tallies[procedure].failures:
            logger.warning(f"{procedure.value}: {tallies[procedure].failures} replication(s) had degenerate segments")

    cell = McCell(config=cfg, tallies=tallies)
    summary = ", ".join(f"{p.value}={cell.rejection_rate(p):.4f}" for p in cfg.tests)
    logger.info(f"Cell finished in {time.perf_counter() - started:.1f}s: {summary}")
    return cell


@dataclass(frozen=True)
class RhoStudyConfig:
    """Lag-one autocorrelation estimates on contaminated AR(1) samples."""
    n: int = 500
    rho: float = 0.4
    replications: int = 10_000
    seed: int = 0
    outliers: bool = True
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidArgumentError(f"replications must be at least 1, got {self.replications}")

    def as_dict(self) -> dict:
        return {'n': self.n, 'rho': self.rho, 'replications': self.replications,
                'seed': self.seed, 'outliers': self.outliers, 'stream': list(self.stream)}


def _rho_chunk(cfg: RhoStudyConfig, start: int, stop: int) -> np.ndarray:
    dgp = Ar1Config(n=cfg.n, rho=cfg.rho)
    estimates = np.empty((stop - start, 2), dtype=np.float64)
    for row, replication in enumerate(range(start, stop)):
        x = generate_series(dgp, replication_rng(cfg.seed, cfg.stream, replication), cfg.outliers)
        estimates[row] = (sample_acf1(x), robust_acf1(x))
    return estimates


def sample_rho_estimates(cfg: RhoStudyConfig, workers: int = 1) -> np.ndarray:
    """
    Draws the sample and the robust lag-one autocorrelation for each
    replication.

    Returns:
        np.ndarray: Shape (replications, 2); column 0 is sample_acf1, column 1 robust_acf1.
    """
    logger.info(f"Autocorrelation study {cfg.as_dict()} workers={workers}")
    bounds = _chunk_bounds(cfg.replications, max(1, workers))
    return np.concatenate(_map_chunks(_rho_chunk, cfg, bounds, workers), axis=0)
