"""
Data-generating processes of the simulation study: AR(1) noise with a single
mean shift, fractional Gaussian noise, and outlier contamination.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from rankbreak.common.errors import EmbeddingError, InvalidArgumentError

logger = logging.getLogger(__name__)

EIGENVALUE_TOLERANCE = 1e-9
OUTLIER_FACTOR = 50.0
# Outliers replace X_[0.2n], X_[0.4n], X_[0.6n], X_[0.8n] (1-based, floor).
OUTLIER_TENTHS = (2, 4, 6, 8)
MIN_OUTLIER_LENGTH = 5


@dataclass(frozen=True)
class Ar1Config:
    """
    AR(1) noise Y_i = rho * Y_{i-1} + eps_i with mean mu up to the change-point
    k* = floor(n * theta) and mu + delta after it.
    """
    n: int
    rho: float = 0.4
    theta: float = 0.5
    delta: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise InvalidArgumentError(f"rho must satisfy |rho| < 1, got {self.rho}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be at least 1, got {self.n}")
        if not 0 < self.theta < 1:
            raise InvalidArgumentError(f"theta must lie in (0, 1), got {self.theta}")

    @property
    def changepoint(self) -> int:
        return int(math.floor(self.n * self.theta))

    def as_dict(self) -> dict:
        return {'process': 'ar1', 'n': self.n, 'rho': self.rho, 'theta': self.theta,
                'delta': self.delta, 'mu': self.mu}


@dataclass(frozen=True)
class FgnConfig:
    """Fractional Gaussian noise with memory parameter d and Hurst index H = d + 1/2."""
    n: int
    d: float = 0.4

    def __post_init__(self):
        # d = 0 is white noise; it is accepted for checking the generator.
        if not 0 <= self.d < 0.5:
            raise InvalidArgumentError(f"d must lie in [0, 1/2), got {self.d}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be at least 1, got {self.n}")

    @property
    def hurst(self) -> float:
        return self.d + 0.5

    def as_dict(self) -> dict:
        return {'process': 'fgn', 'n': self.n, 'd': self.d}


def gen_ar1_changepoint(cfg: Ar1Config, rng: np.random.Generator) -> np.ndarray:
    """
    Draws an AR(1) sample with a mean shift. Y_0 comes from the stationary law
    N(0, 1/(1 - rho^2)), so the noise is stationary from the first observation.
    """
    innovations = rng.standard_normal(cfg.n)
    y0 = rng.standard_normal() / math.sqrt(1.0 - cfg.rho ** 2)
    noise = lfilter([1.0], [1.0, -cfg.rho], innovations, zi=[cfg.rho * y0])[0]

    x = noise + cfg.mu
    x[cfg.changepoint:] += cfg.delta
    return x


def fgn_autocovariance(hurst: float, lags: np.ndarray) -> np.ndarray:
    """gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2 for unit-variance fGn."""
    k = np.abs(np.asarray(lags, dtype=np.float64))
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k ** two_h + np.abs(k - 1) ** two_h)


def circulant_eigenvalues(hurst: float, n: int) -> np.ndarray:
    """
    Eigenvalues of the size-2n circulant embedding of gamma(0..n). Values in
    [-1e-9, 0) are clamped to zero; anything more negative is an error.
    """
    gamma = fgn_autocovariance(hurst, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigenvalues = np.fft.fft(row).real

    lowest = eigenvalues.min()
    if lowest < -EIGENVALUE_TOLERANCE:
        raise EmbeddingError(f"circulant embedding has eigenvalue {lowest:.3e} for H={hurst}, n={n}")
    return np.maximum(eigenvalues, 0.0)


def gen_fgn(cfg: FgnConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Exact fractional Gaussian noise by circulant embedding (Davies-Harte).

    With M = 2n, complex white noise Z and the circulant eigenvalues lambda,
    fft(sqrt(lambda / M) * Z) has real and imaginary parts that are each
    Gaussian with the circulant covariance; the first n coordinates of the
    real part are the sample.
    """
    n = cfg.n
    eigenvalues = circulant_eigenvalues(cfg.hurst, n)
    size = eigenvalues.size
    spectrum = np.sqrt(eigenvalues / size) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
    return np.fft.fft(spectrum).real[:n]


def inject_outliers(x) -> np.ndarray:
    """
    Copy of x with the observations at 1-based positions floor(0.2n),
    floor(0.4n), floor(0.6n) and floor(0.8n) multiplied by 50.
    """
    values = np.array(x, dtype=np.float64)
    n = values.size
    if n < MIN_OUTLIER_LENGTH:
        raise InvalidArgumentError(f"outlier injection needs n >= {MIN_OUTLIER_LENGTH}, got {n}")

    positions = [tenths * n // 10 - 1 for tenths in OUTLIER_TENTHS]
    values[positions] *= OUTLIER_FACTOR
    return values
