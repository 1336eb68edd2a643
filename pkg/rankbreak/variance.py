"""
Long-run variance and scale estimators, and the lag-one autocorrelation
estimators used to choose their block length.

All autocovariances use the divisor n at every lag.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import pdist
from scipy.stats import rankdata

from rankbreak.common.errors import (
    DegenerateSegmentError,
    InvalidArgumentError,
    ZeroScaleError,
    ZeroVarianceError,
)

logger = logging.getLogger(__name__)

QN_CONSTANT = 2.21914
DEFAULT_BANDWIDTH_C = 15.0


class VarianceKind(Enum):
    BARTLETT = "bartlett"
    CARLSTEIN_C = "carlstein"
    CARLSTEIN_W = "carlstein-wilcoxon"


class BlockRule(Enum):
    CARLSTEIN_AR1 = "carlstein-ar1"


class RhoSource(Enum):
    SAMPLE_ACF = "acf"
    ROBUST_Q = "robust"


@dataclass(frozen=True)
class VarianceConfig:
    """
    How a procedure estimates the long-run scale of a segment.

    Attributes:
        kind: Which estimator to use.
        bandwidth_c: Bartlett constant C in q(n) = floor(C * log10(n)).
        block_rule: Block-length rule for the Carlstein estimators.
        rho_source: Lag-one autocorrelation estimator feeding the block rule.
        fixed_block: Block length override; skips the block rule when set.
    """
    kind: VarianceKind = VarianceKind.CARLSTEIN_C
    bandwidth_c: float = DEFAULT_BANDWIDTH_C
    block_rule: BlockRule = BlockRule.CARLSTEIN_AR1
    rho_source: RhoSource = RhoSource.SAMPLE_ACF
    fixed_block: int | None = None

    def __post_init__(self):
        if not self.bandwidth_c > 0:
            raise InvalidArgumentError(f"bandwidth_c must be positive, got {self.bandwidth_c}")
        if self.fixed_block is not None and self.fixed_block < 1:
            raise InvalidArgumentError(f"fixed_block must be at least 1, got {self.fixed_block}")

    def bartlett_bandwidth(self, n: int) -> int:
        """q(n) = floor(C * log10(n))."""
        return int(math.floor(self.bandwidth_c * math.log10(n)))

    def as_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            'bandwidth_c': self.bandwidth_c,
            'block_rule': self.block_rule.value,
            'rho_source': self.rho_source.value,
            'fixed_block': self.fixed_block,
        }


def _as_series(x, min_length: int, what: str) -> np.ndarray:
    values = np.asarray(x, dtype=np.float64)
    if values.ndim != 1:
        raise InvalidArgumentError(f"{what} expects a one-dimensional series")
    if values.size < min_length:
        raise InvalidArgumentError(f"{what} needs at least {min_length} observations, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"{what} got NaN or infinite values")
    return values


def _centered_block_sums(x: np.ndarray, block: int, what: str) -> np.ndarray:
    n = x.size
    if block < 1:
        raise InvalidArgumentError(f"block must be at least 1, got {block}")
    n_blocks = n // block
    if n_blocks < 2:
        raise DegenerateSegmentError(
            f"{what} needs at least 2 blocks of length {block}, segment has {n} observations")
    # Trailing partial block is discarded.
    sums = x[:n_blocks * block].reshape(n_blocks, block).sum(axis=1)
    return sums - (block / n) * x.sum()


def bartlett_lrv(x, q: int) -> float:
    """
    Bartlett kernel estimate of the long-run variance.

    Args:
        x: The series.
        q (int): Bandwidth, 0 <= q < n.

    Returns:
        float: gamma(0) + 2 * sum_{j=1..q} (1 - j/(q+1)) * gamma(j).
    """
    values = _as_series(x, 2, "bartlett_lrv")
    n = values.size
    if not 0 <= q < n:
        raise InvalidArgumentError(f"bandwidth q must satisfy 0 <= q < n={n}, got {q}")

    centered = values - values.mean()
    s2 = centered @ centered / n
    for j in range(1, q + 1):
        weight = 1.0 - j / (q + 1)
        s2 += 2.0 * weight * (centered[:n - j] @ centered[j:]) / n

    # Bartlett weights are positive semidefinite; only rounding can go below zero.
    return max(float(s2), 0.0)


def carlstein_lrv(x, block: int) -> float:
    """
    Non-overlapping block subsampling estimate of the long-run variance.

    Averages block^-1 * (block sum - block/n * total)^2 over the floor(n/block)
    full blocks.
    """
    values = _as_series(x, 2, "carlstein_lrv")
    centered_sums = _centered_block_sums(values, block, "carlstein_lrv")
    return float(np.mean(centered_sums ** 2) / block)


def carlstein_wilcoxon_scale(x, block: int) -> float:
    """
    Block subsampling estimate of the long-run scale sigma (not sigma^2) of
    F_n(X), where F_n is the empirical distribution function of the segment.

    Only the ranks of x enter, so the value is invariant under strictly
    increasing transforms of the data.
    """
    values = _as_series(x, 2, "carlstein_wilcoxon_scale")
    ecdf = rankdata(values, method='max') / values.size
    centered_sums = _centered_block_sums(ecdf, block, "carlstein_wilcoxon_scale")
    return float(math.sqrt(math.pi / 2) * np.mean(np.abs(centered_sums)) / math.sqrt(block))


def block_length_ar1(rho: float, n: int) -> int:
    """
    Carlstein's AR(1) block length max(ceil(n^(1/3) * |2 rho / (1 - rho^2)|^(2/3)), 1).

    The absolute value lets slightly negative estimates give short blocks
    instead of a domain error.
    """
    if not abs(rho) < 1:
        raise InvalidArgumentError(f"rho must satisfy |rho| < 1, got {rho}")
    if n < 1:
        raise InvalidArgumentError(f"n must be at least 1, got {n}")

    ratio = abs(2.0 * rho / (1.0 - rho * rho))
    return max(int(math.ceil(n ** (1.0 / 3.0) * ratio ** (2.0 / 3.0))), 1)


def sample_acf1(x) -> float:
    """Lag-one sample autocorrelation gamma(1)/gamma(0)."""
    values = _as_series(x, 2, "sample_acf1")
    centered = values - values.mean()
    gamma0 = centered @ centered
    if gamma0 == 0:
        raise ZeroVarianceError("sample_acf1 is undefined for a constant series")
    return float(np.clip((centered[:-1] @ centered[1:]) / gamma0, -1.0, 1.0))


def qn_scale(x) -> float:
    """
    Qn = 2.21914 times the k-th smallest pairwise distance |x_i - x_j|, i < j,
    with k = max(1, floor(C(n, 2) / 4)).
    """
    values = _as_series(x, 2, "qn_scale")
    distances = pdist(values[:, np.newaxis], metric='cityblock')
    k = max(1, distances.size // 4)
    return float(QN_CONSTANT * np.partition(distances, k - 1)[k - 1])


def robust_acf1(x) -> float:
    """
    Robust lag-one autocorrelation built from Qn of the sum and the difference
    of the lagged series u = x[:-1], v = x[1:].
    """
    values = _as_series(x, 3, "robust_acf1")
    u, v = values[:-1], values[1:]
    q_plus = qn_scale(u + v) ** 2
    q_minus = qn_scale(u - v) ** 2
    if q_plus + q_minus == 0:
        raise ZeroScaleError("robust_acf1 is undefined when both Qn scales are zero")
    return float((q_plus - q_minus) / (q_plus + q_minus))


def estimate_rho(x, source: RhoSource) -> float:
    if source is RhoSource.ROBUST_Q:
        return robust_acf1(x)
    return sample_acf1(x)


def resolve_block(x, cfg: VarianceConfig) -> int:
    """
    Block length for a segment: the configured override, otherwise the AR(1)
    rule evaluated at the segment's own autocorrelation estimate.
    """
    if cfg.fixed_block is not None:
        return cfg.fixed_block

    values = np.asarray(x, dtype=np.float64)
    rho = estimate_rho(values, cfg.rho_source)
    if abs(rho) >= 1:
        raise DegenerateSegmentError(
            f"autocorrelation estimate {rho} lies on the boundary, no block length")
    block = block_length_ar1(rho, values.size)
    logger.debug(f"Resolved block length {block} from rho={rho:.4f} ({cfg.rho_source.value}), n={values.size}")
    return block
