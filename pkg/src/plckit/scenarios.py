"""Named parameter sets and assembly of full life-cycle curves."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .diffusion import (
    BassParams,
    GompertzParams,
    bass_cumulative,
    bass_rate,
    gompertz_cumulative,
    gompertz_rate,
)
from .errors import InvalidParameterError
from .repurchase import (
    DIRAC,
    FailureDistribution,
    RepurchaseParams,
    branch_plc,
    total_plc,
)
from .series import SalesSeries


@dataclass(frozen=True)
class Scenario:
    """All free parameters of one market's life cycle.

    Optional entries are absent channels: no Gompertz block means a
    single-branch (de facto monopoly) market, no lifetime means no
    replacement wave.  ``launch_year`` anchors model time zero to the
    calendar.
    """

    name: str
    launch_year: float
    n_B0: float
    A: float
    B: float
    # Gompertz channel
    n_G0: Optional[float] = None
    k: Optional[float] = None
    a: Optional[float] = None
    delay: float = 0.0
    pm_over_p0: Optional[float] = None
    # repurchase, first branch
    R: float = 0.0
    Q: float = 0.0
    t_p: Optional[float] = None
    # repurchase, second branch
    R2: float = 0.0
    Q2: float = 0.0
    t_p2: Optional[float] = None
    market_size: Optional[float] = None
    recurrent: bool = True

    def __post_init__(self):
        has_gompertz = [self.n_G0 is not None, self.k is not None, self.a is not None]
        if any(has_gompertz) and not all(has_gompertz):
            raise InvalidParameterError(
                f"scenario {self.name!r}: n_G0, k, a must be given together"
            )
        if self.R > 0 and self.t_p is None:
            raise InvalidParameterError(
                f"scenario {self.name!r}: replacement needs a lifetime t_p"
            )
        if self.R2 > 0 and self.t_p2 is None:
            raise InvalidParameterError(
                f"scenario {self.name!r}: replacement needs a lifetime t_p2"
            )

    @property
    def has_gompertz(self) -> bool:
        return self.n_G0 is not None

    def bass_params(self) -> BassParams:
        return BassParams(self.A, self.B, self.n_B0)

    def gompertz_params(self) -> GompertzParams:
        if not self.has_gompertz:
            raise InvalidParameterError(f"scenario {self.name!r} has no Gompertz channel")
        return GompertzParams(self.n_G0, self.k, self.a, self.delay)

    def repurchase_params(self, branch: int) -> RepurchaseParams:
        if branch == 1:
            R, Q, t_p = self.R, self.Q, self.t_p
        else:
            R, Q, t_p = self.R2, self.Q2, self.t_p2
        lifetime = t_p if t_p is not None else 1.0
        return RepurchaseParams(
            R, Q, FailureDistribution(DIRAC, lifetime), recurrent=self.recurrent
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def assemble(scenario: Scenario, horizon: float, dt: float = 0.01) -> dict:
    """Build the life-cycle components of a scenario on a uniform grid.

    Returns a dict with ``total`` plus the per-branch series, all anchored
    at the launch year.  Values are market-potential fractions.
    """
    t = np.arange(0.0, horizon + 0.5 * dt, dt)
    bp = scenario.bass_params()
    bass_first = SalesSeries(scenario.launch_year, dt, bass_rate(t, bp))
    bass_adopters = SalesSeries(scenario.launch_year, dt, bass_cumulative(t, bp))
    bass_branch = branch_plc(bass_first, bass_adopters, scenario.repurchase_params(1))
    out = {
        "bass_first": bass_first,
        "bass_adopters": bass_adopters,
        "bass_branch": bass_branch,
    }
    if scenario.has_gompertz:
        gp = scenario.gompertz_params()
        g_first = SalesSeries(scenario.launch_year, dt, gompertz_rate(t, gp))
        g_adopters = SalesSeries(scenario.launch_year, dt, gompertz_cumulative(t, gp))
        g_branch = branch_plc(g_first, g_adopters, scenario.repurchase_params(2))
        out.update(
            {
                "gompertz_first": g_first,
                "gompertz_adopters": g_adopters,
                "gompertz_branch": g_branch,
            }
        )
        out["total"] = total_plc(bass_branch, g_branch, scenario.delay)
    else:
        out["total"] = bass_branch
    return out


# Bundled example scenarios for four durable-goods markets (TV sets in the
# USA, two Mercedes-Benz car classes).  Lifetimes for the car classes come
# from the published narrative rather than a parameter table.
BUILTIN_SCENARIOS = {
    "colour_tv": Scenario(
        name="colour_tv",
        launch_year=1954.0,
        n_B0=0.01,
        A=0.001,
        B=1.8,
        n_G0=0.97,
        k=27.0,
        a=0.103,
        delay=0.5,
        pm_over_p0=0.0,
    ),
    "bw_tv": Scenario(
        name="bw_tv",
        launch_year=1948.0,
        n_B0=0.18,
        A=0.02,
        B=2.5,
        n_G0=0.77,
        k=8.5,
        a=0.2,
        delay=0.0,
        pm_over_p0=0.33,
        R=0.3,
        Q=0.06,
        t_p=9.2,
        R2=0.65,
        Q2=0.06,
        t_p2=10.2,
        market_size=53e6,
    ),
    "mb_c_class": Scenario(
        name="mb_c_class",
        launch_year=1979.0,
        n_B0=1.0,
        A=0.004,
        B=0.58,
        R=1.2,
        Q=0.05,
        t_p=8.0,
        market_size=1.1e6,
    ),
    "mb_s_class": Scenario(
        name="mb_s_class",
        launch_year=1964.0,
        n_B0=1.0,
        A=0.02,
        B=0.5,
        R=1.0,
        Q=0.15,
        t_p=16.0,
        market_size=0.27e6,
    ),
}
