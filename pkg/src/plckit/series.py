"""Uniformly sampled time series of sales, penetration or prices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, InvalidParameterError


@dataclass(frozen=True)
class SalesSeries:
    """A uniformly sampled series anchored to a calendar origin.

    ``t0`` is the calendar year of the first sample, ``dt`` the spacing in
    years.  Values are fractions of the market potential, or absolute units
    when denormalized by the market size.
    """

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise InvalidParameterError("values must be one-dimensional")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        """Calendar times of the samples."""
        return self.t0 + self.dt * np.arange(len(self.values))

    def with_values(self, values) -> "SalesSeries":
        return SalesSeries(self.t0, self.dt, np.asarray(values, dtype=float))

    def same_grid(self, other: "SalesSeries", check_t0: bool = True) -> bool:
        if len(self) != len(other):
            return False
        if abs(self.dt - other.dt) > 1e-12 * max(self.dt, other.dt):
            return False
        if check_t0 and abs(self.t0 - other.t0) > 1e-9:
            return False
        return True

    def require_same_grid(self, other: "SalesSeries", check_t0: bool = True) -> None:
        if not self.same_grid(other, check_t0=check_t0):
            raise AlignmentError(
                f"series grids do not match: (t0={self.t0}, dt={self.dt}, "
                f"n={len(self)}) vs (t0={other.t0}, dt={other.dt}, n={len(other)})"
            )
