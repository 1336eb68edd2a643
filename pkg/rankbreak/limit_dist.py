"""
Critical values for the maximum of the suprema of two independent Brownian
bridges.

``sup |B(t)|`` follows the Kolmogorov distribution K, so for the maximum Z of
two independent copies ``P(Z <= c) = K(c)**2``.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import bisect
from scipy.stats import kstwobign

from rankbreak.common.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

BRACKET = (0.0, 10.0)
XTOL = 1e-10


def kolmogorov_cdf(x: float) -> float:
    """
    P(sup_{0<=t<=1} |B(t)| <= x) for a Brownian bridge B.

    Args:
        x (float): Non-negative threshold.

    Returns:
        float: 1 + 2 * sum_{k>=1} (-1)^k exp(-2 k^2 x^2); 0 at x = 0.
    """
    if not math.isfinite(x) and x != math.inf:
        raise InvalidArgumentError(f"x must be a number, got {x}")
    if x < 0:
        raise InvalidArgumentError(f"x must be non-negative, got {x}")
    if x == 0:
        return 0.0
    return float(kstwobign.cdf(x))


def p_value(statistic: float) -> float:
    """P(Z > statistic) for Z the maximum of two independent bridge suprema."""
    if statistic <= 0:
        return 1.0
    return 1.0 - kolmogorov_cdf(statistic) ** 2


@lru_cache(maxsize=64)
def critical_value(alpha: float) -> float:
    """
    Solves K(c) = (1 - alpha)^(1/2) for c by bisection on [0, 10].

    Args:
        alpha (float): Significance level in (0, 1).

    Returns:
        float: The critical value c_alpha.
    """
    if not 0 < alpha < 1:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")

    target = math.sqrt(1.0 - alpha)
    c_alpha = bisect(lambda c: kolmogorov_cdf(c) - target, *BRACKET, xtol=XTOL)
    logger.debug(f"Critical value for alpha={alpha}: {c_alpha:.10f}")
    return float(c_alpha)


@dataclass(frozen=True)
class CriticalValueTable:
    """Ordered (alpha, c_alpha) pairs; c_alpha decreases as alpha grows."""
    entries: tuple[tuple[float, float], ...]

    @classmethod
    def build(cls, alphas=(0.01, 0.025, 0.05, 0.10)) -> 'CriticalValueTable':
        ordered = sorted(set(alphas))
        return cls(tuple((alpha, critical_value(alpha)) for alpha in ordered))

    def lookup(self, alpha: float) -> float:
        for entry_alpha, c_alpha in self.entries:
            if entry_alpha == alpha:
                return c_alpha
        raise KeyError(alpha)

    def as_dict(self) -> dict[float, float]:
        return dict(self.entries)
