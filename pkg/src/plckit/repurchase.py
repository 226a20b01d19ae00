"""Replacement waves, multiple purchase, and assembly of the full life cycle.

Replacement demand is the convolution of past sales with the product
failure-time distribution.  With a sharp (delta) failure time this is an
exact shift; in recurrent mode replaced units are themselves replaced
later, producing an echo train at multiples of the mean lifetime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    AlignmentError,
    InvalidInputError,
    InvalidParameterError,
    ResolutionError,
)
from .series import SalesSeries

DIRAC = "dirac"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class FailureDistribution:
    """Failure-time distribution of a unit in service.

    ``dirac`` fails exactly at the mean lifetime; ``gaussian`` spreads the
    failure around it with a normal truncated at zero and renormalized.
    """

    kind: str
    mean_lifetime: float
    spread: float = 0.0

    def __post_init__(self):
        if self.kind not in (DIRAC, GAUSSIAN):
            raise InvalidParameterError(f"unknown failure kind {self.kind!r}")
        if self.mean_lifetime <= 0:
            raise InvalidParameterError(
                f"mean_lifetime must be positive, got {self.mean_lifetime}"
            )
        if self.spread < 0:
            raise InvalidParameterError(f"spread must be non-negative, got {self.spread}")
        if self.kind == DIRAC and self.spread != 0:
            raise InvalidParameterError("dirac failure must have zero spread")
        if self.kind == GAUSSIAN and self.spread == 0:
            raise InvalidParameterError(
                "gaussian failure needs a positive spread; use dirac otherwise"
            )

    def density(self, t):
        """Failure density on (0, inf); integrates to one."""
        if self.kind == DIRAC:
            raise InvalidParameterError("dirac failure has no density")
        a = (0.0 - self.mean_lifetime) / self.spread
        dist = stats.truncnorm(a, np.inf, loc=self.mean_lifetime, scale=self.spread)
        return dist.pdf(t)

    def discrete_kernel(self, dt: float) -> np.ndarray:
        """Quadrature weights on the grid j*dt, normalized to unit mass.

        The weight at lag zero is dropped so feedback convolutions stay
        explicit; for any reasonable lifetime/spread ratio it is negligible
        before renormalization anyway.
        """
        if self.kind == DIRAC:
            raise InvalidParameterError("dirac failure is handled as an exact shift")
        n = int(np.ceil((self.mean_lifetime + 8.0 * self.spread) / dt)) + 1
        w = self.density(dt * np.arange(n)) * dt
        w[0] = 0.0
        total = w.sum()
        if total <= 0:
            raise ResolutionError("failure kernel has no mass on this grid")
        return w / total


@dataclass(frozen=True)
class RepurchaseParams:
    """Replacement and multiple-purchase settings for one diffusion branch."""

    replacement_fraction: float
    multiple_rate: float
    failure: FailureDistribution
    recurrent: bool = True

    def __post_init__(self):
        if self.replacement_fraction < 0:
            raise InvalidParameterError(
                f"replacement_fraction must be non-negative, got "
                f"{self.replacement_fraction}"
            )
        if self.multiple_rate < 0:
            raise InvalidParameterError(
                f"multiple_rate must be non-negative, got {self.multiple_rate}"
            )


def _shift_interp(values: np.ndarray, lag_steps: float) -> np.ndarray:
    """Shift a series right by a possibly fractional number of steps."""
    n = len(values)
    out = np.zeros(n)
    j0 = int(np.floor(lag_steps))
    frac = lag_steps - j0
    for i in range(n):
        x = i - lag_steps
        if x < 0:
            continue
        j = i - j0
        lo = values[j - 1] if 0 <= j - 1 < n else 0.0
        hi = values[j] if 0 <= j < n else 0.0
        # value at fractional index i - lag_steps
        out[i] = lo * frac + hi * (1.0 - frac) if frac else hi
    return out


def _dirac_recurrent(base: np.ndarray, R: float, lag_steps: float) -> np.ndarray:
    """Solve y = base + R * y(t - lag) causally with linear interpolation."""
    n = len(base)
    y = np.zeros(n)
    j0 = int(np.floor(lag_steps))
    frac = lag_steps - j0
    for i in range(n):
        y[i] = base[i]
        x = i - lag_steps
        if x >= 0:
            j = i - j0
            lo = y[j - 1] if j - 1 >= 0 else 0.0
            hi = y[j] if j <= i else 0.0
            past = lo * frac + hi * (1.0 - frac) if frac else hi
            y[i] += R * past
    return y


def _kernel_recurrent(base: np.ndarray, R: float, w: np.ndarray) -> np.ndarray:
    """Solve y = base + R * (w * y) causally; w has no lag-zero mass."""
    n = len(base)
    y = np.zeros(n)
    for i in range(n):
        jmax = min(i, len(w) - 1)
        acc = 0.0
        if jmax >= 1:
            acc = float(np.dot(w[1 : jmax + 1], y[i - 1 :: -1][: jmax]))
        y[i] = base[i] + R * acc
    return y


def _validate_first(first: SalesSeries, rp: RepurchaseParams) -> None:
    if np.any(first.values < 0):
        raise InvalidInputError("sales series must be non-negative")
    if first.dt > rp.failure.mean_lifetime / 2.0:
        raise ResolutionError(
            f"dt={first.dt} undersamples the replacement wave for lifetime "
            f"{rp.failure.mean_lifetime}"
        )


def replacement_convolve(first: SalesSeries, rp: RepurchaseParams) -> SalesSeries:
    """Replacement sales induced by a first-purchase series.

    Non-recurrent mode convolves the first-purchase sales once with the
    failure distribution.  Recurrent mode feeds total sales (first plus
    replacement) back into the convolution, so a pulse echoes at every
    multiple of the lifetime with amplitude scaled by the replacement
    fraction raised to the echo index.
    """
    _validate_first(first, rp)
    R = rp.replacement_fraction
    vals = first.values
    if R == 0:
        return first.with_values(np.zeros(len(first)))
    if rp.failure.kind == DIRAC:
        lag = rp.failure.mean_lifetime / first.dt
        if rp.recurrent:
            total = _dirac_recurrent(vals, R, lag)
            rep = total - vals
        else:
            rep = R * _shift_interp(vals, lag)
    else:
        w = rp.failure.discrete_kernel(first.dt)
        if rp.recurrent:
            total = _kernel_recurrent(vals, R, w)
            rep = total - vals
        else:
            full = np.convolve(vals, w)[: len(vals)]
            rep = R * full
    return first.with_values(rep)


def multiple_purchase(adopters: SalesSeries, rate: float) -> SalesSeries:
    """Repurchase proportional to the current adopter stock."""
    if rate < 0:
        raise InvalidParameterError(f"rate must be non-negative, got {rate}")
    d = np.diff(adopters.values)
    if len(d) and d.min() < -1e-12:
        raise InvalidInputError("adopter series must be non-decreasing")
    return adopters.with_values(rate * adopters.values)


def branch_plc(
    first: SalesSeries, adopters: SalesSeries, rp: RepurchaseParams
) -> SalesSeries:
    """Total sales of one diffusion branch: first + replacement + multiple.

    In recurrent mode the replacement feedback acts on the branch's total
    sales including the multiple-purchase floor, since every unit in
    service eventually fails, however it was bought.
    """
    first.require_same_grid(adopters)
    base = first.values + multiple_purchase(adopters, rp.multiple_rate).values
    R = rp.replacement_fraction
    if R == 0:
        return first.with_values(base)
    if rp.recurrent:
        if rp.failure.kind == DIRAC:
            lag = rp.failure.mean_lifetime / first.dt
            _validate_first(first, rp)
            total = _dirac_recurrent(base, R, lag)
        else:
            _validate_first(first, rp)
            total = _kernel_recurrent(base, R, rp.failure.discrete_kernel(first.dt))
        return first.with_values(total)
    rep = replacement_convolve(first, rp)
    return first.with_values(base + rep.values)


def total_plc(
    bass_branch: SalesSeries, gompertz_branch: SalesSeries, delay: float
) -> SalesSeries:
    """Superpose the two branch series, delaying the Gompertz branch.

    Both series must share the grid; the Gompertz branch is zero before its
    shifted origin.
    """
    if delay < 0:
        raise InvalidParameterError(f"delay must be non-negative, got {delay}")
    bass_branch.require_same_grid(gompertz_branch)
    shifted = _shift_interp(gompertz_branch.values, delay / bass_branch.dt)
    return bass_branch.with_values(bass_branch.values + shifted)
