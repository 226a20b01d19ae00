"""Multiplicative-growth Monte Carlo and the lognormal size law it implies.

Business-unit sales that grow by i.i.d. proportional increments converge,
by the central limit theorem in the log, to a lognormal size distribution
whose log-variance grows linearly with time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError, InvalidInputError, InvalidParameterError

NORMAL = "normal"
UNIFORM = "uniform"


@dataclass(frozen=True)
class GibratConfig:
    """Monte Carlo settings for the proportionate-growth process."""

    n_units: int
    horizon: int            # number of growth steps
    drift: float            # mean proportional increment per step
    volatility: float       # std of the increment per step
    seed: int
    initial_size: float = 1.0
    increment: str = NORMAL

    def __post_init__(self):
        if self.n_units < 1:
            raise InvalidParameterError(f"n_units must be >= 1, got {self.n_units}")
        if self.horizon < 0:
            raise InvalidParameterError(f"horizon must be >= 0, got {self.horizon}")
        if self.volatility < 0:
            raise InvalidParameterError(
                f"volatility must be non-negative, got {self.volatility}"
            )
        if self.initial_size <= 0:
            raise InvalidParameterError(
                f"initial_size must be positive, got {self.initial_size}"
            )
        if self.increment not in (NORMAL, UNIFORM):
            raise InvalidParameterError(f"unknown increment kind {self.increment!r}")


@dataclass(frozen=True)
class GibratSample:
    """Final sizes of all units plus truncation metadata."""

    sizes: np.ndarray
    resampled: int
    config: GibratConfig

    def __post_init__(self):
        arr = np.asarray(self.sizes, dtype=float).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "sizes", arr)


def _draw(rng, cfg: GibratConfig, n: int) -> np.ndarray:
    if cfg.increment == NORMAL:
        return rng.normal(cfg.drift, cfg.volatility, n)
    half_width = np.sqrt(3.0) * cfg.volatility
    return rng.uniform(cfg.drift - half_width, cfg.drift + half_width, n)


def gibrat_simulate(cfg: GibratConfig) -> GibratSample:
    """Evolve every unit by y <- y * (1 + r) for the configured horizon.

    Increments with 1 + r <= 0 are resampled (size cannot go negative);
    the number of resamples is reported in the result.
    """
    rng = np.random.default_rng(cfg.seed)
    log_sizes = np.full(cfg.n_units, np.log(cfg.initial_size))
    resampled = 0
    for _ in range(cfg.horizon):
        r = _draw(rng, cfg, cfg.n_units)
        bad = r <= -1.0
        while np.any(bad):
            resampled += int(bad.sum())
            r[bad] = _draw(rng, cfg, int(bad.sum()))
            bad = r <= -1.0
        log_sizes += np.log1p(r)
    return GibratSample(np.exp(log_sizes), resampled, cfg)


def lognormal_pdf(y, t: float, cfg: GibratConfig):
    """Limiting size density after ``t`` steps.

    Log-mean and log-variance both grow linearly in ``t``; the density is
    the standard lognormal in ``ln(y / y0)``.
    """
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if cfg.volatility <= 0:
        raise DomainError("volatility must be positive for a proper density")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("size must be positive")
    s = cfg.volatility * np.sqrt(t)
    z = np.log(y / cfg.initial_size) - cfg.drift * t
    out = np.exp(-(z**2) / (2.0 * s**2)) / (np.sqrt(2.0 * np.pi) * s * y)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class NormalityReport:
    """Goodness of the normal fit to the log sizes."""

    n: int
    mean_log: float
    std_log: float
    skewness: float
    excess_kurtosis: float
    ks_distance: float
    ks_critical_95: float
    degenerate: bool = False

    @property
    def passed(self) -> bool:
        return not self.degenerate and self.ks_distance < self.ks_critical_95


def normality_test(sample) -> NormalityReport:
    """Compare the log of a size sample against its fitted normal.

    Reports skewness, excess kurtosis and the Kolmogorov-Smirnov distance
    against the fitted normal, together with the 95% critical value.
    """
    if isinstance(sample, GibratSample):
        sample = sample.sizes
    sizes = np.asarray(sample, dtype=float)
    if len(sizes) < 1000:
        raise InvalidInputError(f"need at least 1000 sizes, got {len(sizes)}")
    if np.any(sizes <= 0):
        raise InvalidInputError("sizes must be positive")
    logs = np.log(sizes)
    n = len(logs)
    mean = float(np.mean(logs))
    std = float(np.std(logs, ddof=1))
    crit = 1.36 / np.sqrt(n)
    if std <= 1e-12 * max(1.0, abs(mean)):
        return NormalityReport(n, mean, 0.0, 0.0, 0.0, np.nan, crit, degenerate=True)
    ks = stats.kstest(logs, "norm", args=(mean, std))
    return NormalityReport(
        n=n,
        mean_log=mean,
        std_log=std,
        skewness=float(stats.skew(logs)),
        excess_kurtosis=float(stats.kurtosis(logs)),
        ks_distance=float(ks.statistic),
        ks_critical_95=float(crit),
    )
