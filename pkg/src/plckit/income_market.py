"""Lower-class income distribution and the price-gated market volume.

The addressable market for a durable at real price ``mu`` consists of a
price-independent upper class plus the fraction of the lower class whose
income suffices.  With an exponential income distribution the lower-class
fraction collapses to a Gaussian factor in the price above the natural
price ``mu_m``, at which the whole market potential can afford the good.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError


@dataclass(frozen=True)
class IncomeModel:
    """Exponential (Boltzmann-Gibbs) income distribution of the lower class."""

    mean_income: float

    def __post_init__(self):
        if self.mean_income <= 0:
            raise InvalidParameterError(
                f"mean_income must be positive, got {self.mean_income}"
            )


def income_pdf(h, model: IncomeModel):
    """Probability density of annual income ``h``: (1/I) exp(-h/I)."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise DomainError("income must be non-negative")
    I = model.mean_income
    out = np.exp(-h / I) / I
    return out if out.ndim else float(out)


def real_price(p, mean_income: float):
    """Nominal price scaled by the mean lower-class income."""
    if mean_income <= 0:
        raise InvalidParameterError(
            f"mean_income must be positive, got {mean_income}"
        )
    p = np.asarray(p, dtype=float)
    out = p / mean_income
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MarketVolumeParams:
    """Market potential split into upper class and price-gated lower class.

    ``natural_price`` is the real price at which the volume equals the full
    market potential; ``width`` controls how fast the lower class drops out
    as the price rises above it.
    """

    market_potential: float
    upper_class: float
    natural_price: float
    width: float

    def __post_init__(self):
        if self.market_potential <= 0:
            raise InvalidParameterError(
                f"market_potential must be positive, got {self.market_potential}"
            )
        if not 0 <= self.upper_class <= self.market_potential:
            raise InvalidParameterError(
                "upper_class must lie in [0, market_potential], got "
                f"{self.upper_class}"
            )
        if self.width <= 0:
            raise InvalidParameterError(f"width must be positive, got {self.width}")
        if self.natural_price < 0:
            raise InvalidParameterError(
                f"natural_price must be non-negative, got {self.natural_price}"
            )

    @property
    def lower_class(self) -> float:
        return self.market_potential - self.upper_class

    @property
    def lower_fraction(self) -> float:
        return self.lower_class / self.market_potential

    @property
    def upper_fraction(self) -> float:
        return self.upper_class / self.market_potential


def market_volume(mu, params: MarketVolumeParams):
    """Number of agents who can afford the good at real price ``mu``.

    Clamped at the full market potential for ``mu <= natural_price``; decays
    to the upper-class share as ``mu`` grows.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.min(initial=0.0) < 0:
        raise DomainError("real price must be non-negative")
    excess = np.maximum(mu - params.natural_price, 0.0)
    out = (
        params.lower_class * np.exp(-(excess**2) / (2.0 * params.width**2))
        + params.upper_class
    )
    return out if out.ndim else float(out)


def volume_density(mu, params: MarketVolumeParams):
    """Market volume scaled by the market potential; lies in [0, 1]."""
    out = np.asarray(market_volume(mu, params)) / params.market_potential
    return out if out.ndim else float(out)


def _volume_density_arr(mu: np.ndarray, params: MarketVolumeParams) -> np.ndarray:
    """volume_density for a validated float array; hot-path variant."""
    excess = np.maximum(mu - params.natural_price, 0.0)
    excess *= excess
    excess /= -2.0 * params.width**2
    out = np.exp(excess)
    out *= params.lower_class / params.market_potential
    out += params.upper_class / params.market_potential
    return out
