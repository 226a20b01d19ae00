"""Closed-form first-purchase diffusion curves and the mean-price decline.

Two independent adoption channels are modeled.  Information spreading
through the social network follows the classic innovation/imitation
dynamics; market-volume expansion driven by an exponentially declining
mean price yields a Gompertz curve.  The link between the two views is
``shape = offset**2 / (2 * width**2)``: substituting the exponential price
path into the Gaussian volume factor reproduces the Gompertz exponent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, DomainError, InvalidParameterError
from .income_market import MarketVolumeParams, volume_density
from .series import SalesSeries


@dataclass(frozen=True)
class BassParams:
    """Innovation/imitation adoption within a fixed potential pool."""

    innovation_rate: float   # spontaneous adoption, 1/year
    imitation_rate: float    # word-of-mouth, 1/year
    initial_pool: float      # fraction of the market potential, (0, 1]

    def __post_init__(self):
        if self.innovation_rate <= 0:
            raise InvalidParameterError(
                f"innovation_rate must be positive, got {self.innovation_rate}"
            )
        if self.imitation_rate < 0:
            raise InvalidParameterError(
                f"imitation_rate must be non-negative, got {self.imitation_rate}"
            )
        if not 0 < self.initial_pool <= 1:
            raise InvalidParameterError(
                f"initial_pool must lie in (0, 1], got {self.initial_pool}"
            )


def bass_cumulative(t, p: BassParams):
    """Cumulative adopter fraction at time ``t`` since launch."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    A, B = p.innovation_rate, p.imitation_rate
    e = np.exp(-(A + B) * t)
    out = p.initial_pool * (1.0 - e) / (1.0 + (B / A) * e)
    return out if out.ndim else float(out)


def bass_rate(t, p: BassParams):
    """First-purchase sales rate; the time derivative of the cumulative curve."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    A, B = p.innovation_rate, p.imitation_rate
    e = np.exp(-(A + B) * t)
    out = p.initial_pool * A * (A + B) ** 2 * e / (A + B * e) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PriceTrajectory:
    """Exponential decline of the mean real price toward its floor."""

    initial_offset: float   # price above the floor at t = 0
    floor: float            # asymptotic (natural) price
    decline_rate: float     # 1/year

    def __post_init__(self):
        if self.initial_offset < 0:
            raise InvalidParameterError(
                f"initial_offset must be non-negative, got {self.initial_offset}"
            )
        if self.decline_rate < 0:
            raise InvalidParameterError(
                f"decline_rate must be non-negative, got {self.decline_rate}"
            )
        if self.floor < 0:
            raise InvalidParameterError(f"floor must be non-negative, got {self.floor}")


def mean_price(t, traj: PriceTrajectory):
    """Mean real price at time ``t``: offset * exp(-rate * t) + floor."""
    t = np.asarray(t, dtype=float)
    out = traj.initial_offset * np.exp(-traj.decline_rate * t) + traj.floor
    return out if out.ndim else float(out)


def price_function(series: SalesSeries, pm_over_p0: float) -> SalesSeries:
    """Scale a nominal price series to the normalized decline component.

    Subtracts the floor ``pm = pm_over_p0 * p0`` (``p0`` is the first
    sample) and divides by ``p0``.  On model-generated data the log of the
    result is affine in time with slope equal to minus the decline rate.
    """
    if not 0 <= pm_over_p0 < 1:
        raise InvalidParameterError(
            f"pm_over_p0 must lie in [0, 1), got {pm_over_p0}"
        )
    if len(series) == 0:
        raise DegenerateSeriesError("empty price series")
    p = series.values
    if np.any(p <= 0):
        raise DegenerateSeriesError("all prices must be positive")
    p0 = p[0]
    pm = pm_over_p0 * p0
    if np.any(p <= pm):
        raise DegenerateSeriesError(
            "price series touches the candidate floor; scaled series would "
            "not support a log transform"
        )
    return series.with_values((p - pm) / p0)


@dataclass(frozen=True)
class GompertzParams:
    """Adoption by market-volume expansion under a declining mean price."""

    saturation: float     # asymptotic adopter fraction, [0, 1)
    shape: float          # launch-price offset squared over twice the width squared
    decline_rate: float   # price decline rate, 1/year
    delay: float = 0.0    # start delay relative to the launch clock, years

    def __post_init__(self):
        if not 0 <= self.saturation < 1:
            raise InvalidParameterError(
                f"saturation must lie in [0, 1), got {self.saturation}"
            )
        # shape 0 is the degenerate launch-at-floor case (no expansion left)
        if self.shape < 0:
            raise InvalidParameterError(f"shape must be non-negative, got {self.shape}")
        if self.decline_rate < 0:
            raise InvalidParameterError(
                f"decline_rate must be non-negative, got {self.decline_rate}"
            )


def gompertz_cumulative(t, g: GompertzParams):
    """Cumulative adopter fraction on the (already shifted) Gompertz clock."""
    t = np.asarray(t, dtype=float)
    out = g.saturation * np.exp(-g.shape * np.exp(-2.0 * g.decline_rate * t))
    return out if out.ndim else float(out)


def gompertz_rate(t, g: GompertzParams):
    """Adoption rate of the Gompertz channel; non-negative."""
    t = np.asarray(t, dtype=float)
    decay = np.exp(-2.0 * g.decline_rate * t)
    out = 2.0 * g.decline_rate * g.shape * g.saturation * np.exp(-g.shape * decay) * decay
    return out if out.ndim else float(out)


def shape_from_price(initial_offset: float, width: float) -> float:
    """Gompertz shape implied by the launch-price offset and volume width."""
    if width <= 0:
        raise InvalidParameterError(f"width must be positive, got {width}")
    return initial_offset**2 / (2.0 * width**2)


def gompertz_consistency(
    g: GompertzParams,
    mv: MarketVolumeParams,
    traj: PriceTrajectory,
    t_max: float = 50.0,
    n_points: int = 2001,
) -> float:
    """Residual between the Gompertz closed form and the volume sweep.

    The sweep route evaluates the market-volume density along the price
    trajectory and subtracts its launch value; the closed-form route uses
    the Gompertz exponent directly.  When ``g.shape`` equals
    ``shape_from_price(traj.initial_offset, mv.width)`` and the decline
    rates agree, the two are identical and the residual is at the level of
    floating-point roundoff.  Any mismatch in the linkage shows up as a
    large residual rather than an error.
    """
    t = np.linspace(0.0, t_max, n_points)
    closed = mv.lower_fraction * (
        np.exp(-g.shape * np.exp(-2.0 * g.decline_rate * t)) - np.exp(-g.shape)
    )
    mu_t = mean_price(t, traj)
    swept = volume_density(mu_t, mv) - volume_density(mean_price(0.0, traj), mv)
    return float(np.max(np.abs(closed - swept)))
