"""Parameter estimation for price decline, diffusion, and repurchase.

All searches are derivative-free simplex runs started from a fixed lattice
of initial points, so a fit is fully determined by its input data and
settings.  The staged pipeline mirrors how the parameters separate: the
price series fixes the decline rate, the penetration series fixes the
diffusion parameters, and the sales series fixes the repurchase block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .dataio import Dataset
from .diffusion import BassParams, GompertzParams, bass_cumulative, gompertz_cumulative
from .errors import (
    ConvergenceError,
    DegenerateSeriesError,
    HorizonError,
    InfeasibleError,
    InvalidInputError,
)
from .repurchase import DIRAC, FailureDistribution, RepurchaseParams, branch_plc
from .scenarios import Scenario, assemble
from .series import SalesSeries

# search bounds, one entry per fittable parameter
BOUNDS = {
    "n_B0": (1e-6, 1.0),
    "A": (1e-9, 1.0),
    "B": (0.0, 10.0),
    "n_G0": (1e-6, 1.0),
    "k": (1e-3, 60.0),
    "a": (1e-6, 2.0),
    "delay": (-5.0, 10.0),
    "pm_over_p0": (0.0, 0.99),
    "R": (0.0, 2.0),
    "Q": (0.0, 1.0),
    "t_p": (1.0, 30.0),
    "R2": (0.0, 2.0),
    "Q2": (0.0, 1.0),
    "t_p2": (1.0, 30.0),
}


@dataclass(frozen=True)
class FitResult:
    """Outcome of one estimation stage or of the full pipeline."""

    parameters: dict
    loss: float
    n_evals: int
    converged: bool
    stage_losses: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.loss < 0:
            raise InvalidInputError("loss must be non-negative")

    def merged(self, other: "FitResult") -> "FitResult":
        """Combine two stages; losses add, convergence must hold for both."""
        params = dict(self.parameters)
        params.update(other.parameters)
        stages = dict(self.stage_losses)
        stages.update(other.stage_losses)
        return FitResult(
            parameters=params,
            loss=self.loss + other.loss,
            n_evals=self.n_evals + other.n_evals,
            converged=self.converged and other.converged,
            stage_losses=stages,
        )


class _Counter:
    def __init__(self):
        self.n = 0


def _penalized(fun, names, counter):
    lo = np.array([BOUNDS[n][0] for n in names])
    hi = np.array([BOUNDS[n][1] for n in names])

    def wrapped(x):
        counter.n += 1
        xc = np.clip(x, lo, hi)
        excess = np.abs(x - xc)
        return fun(xc) + 1e3 * float(np.sum(excess)) + 1e6 * float(np.sum(excess**2))

    return wrapped


def _simplex_search(fun, names, starts, counter, maxiter=4000, restarts=6):
    """Multi-start simplex minimization with restart polishing.

    Starts are visited in order and results reduced by best loss, so the
    output is independent of timing.  The best point is re-polished from
    scratch until the improvement stalls.
    """
    f = _penalized(fun, names, counter)
    best_x, best_f = None, np.inf
    for x0 in starts:
        res = optimize.minimize(
            f,
            np.asarray(x0, dtype=float),
            method="Nelder-Mead",
            options={
                "maxiter": maxiter,
                "xatol": 1e-12,
                "fatol": 1e-15,
                "adaptive": True,
            },
        )
        if res.fun < best_f:
            best_f, best_x = res.fun, res.x
    for _ in range(restarts):
        res = optimize.minimize(
            f,
            best_x,
            method="Nelder-Mead",
            options={
                "maxiter": 2 * maxiter,
                "xatol": 1e-14,
                "fatol": 1e-17,
                "adaptive": True,
            },
        )
        improved = res.fun < best_f - 1e-18
        if res.fun < best_f:
            best_f, best_x = res.fun, res.x
        if not improved:
            break
    lo = np.array([BOUNDS[n][0] for n in names])
    hi = np.array([BOUNDS[n][1] for n in names])
    return np.clip(best_x, lo, hi), float(best_f)


def fit_price_decline(prices: Dataset, floor_grid=None) -> FitResult:
    """Estimate the decline rate and price floor from a price series.

    For each candidate floor fraction the log reduced price is regressed
    on time; the candidate with the smallest regression residual wins and
    its slope gives the decline rate.  Scale-free in the price unit.
    """
    s = prices.series
    if len(s) < 4:
        raise DegenerateSeriesError("price fit needs at least 4 samples")
    p0 = float(s.values[0])
    rel = s.values / p0
    t = s.times - s.t0
    if floor_grid is None:
        floor_grid = np.linspace(0.0, 0.99, 100)
    counter = _Counter()

    def ssr(c):
        counter.n += 1
        mu = rel - c
        if np.any(mu <= 0):
            return None
        fit = stats.linregress(t, np.log(mu))
        resid = np.log(mu) - (fit.intercept + fit.slope * t)
        return float(np.dot(resid, resid)), -float(fit.slope)

    best = None
    for c in floor_grid:
        out = ssr(float(c))
        if out is None:
            continue
        if best is None or out[0] < best[0]:
            best = (out[0], out[1], float(c))
    if best is None:
        raise InfeasibleError("no candidate floor leaves the reduced price positive")
    # refine the winning floor on the continuous interval around it
    step = float(floor_grid[1] - floor_grid[0]) if len(floor_grid) > 1 else 0.01
    lo = max(0.0, best[2] - step)
    hi = min(float(np.min(rel)) - 1e-12, best[2] + step)
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda c: ssr(c)[0] if ssr(c) is not None else np.inf,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        out = ssr(float(res.x))
        if out is not None and out[0] <= best[0]:
            best = (out[0], out[1], float(res.x))
    loss, a, c = best
    return FitResult(
        parameters={"a": a, "pm_over_p0": c, "p0": p0},
        loss=loss,
        n_evals=counter.n,
        converged=True,
        stage_losses={"price": loss},
    )


def _clean_monotone(values: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(np.clip(values, 0.0, None))


def fit_gompertz(
    penetration: Dataset,
    a_fixed: Optional[float] = None,
    baseline=0.0,
    delay_fixed: Optional[float] = None,
) -> FitResult:
    """Fit the price-driven diffusion curve to a penetration series.

    Optimizes saturation, shape, and launch delay, with the decline rate
    fixed when supplied (normally from the price fit) and free otherwise.
    ``baseline`` is subtracted first, removing a known other channel.  The
    series is monotone-cleaned before fitting.

    The shape and delay trade off exactly (only shape * exp(2a*delay)
    is identified by the curve), so pass ``delay_fixed`` whenever the
    launch delay is known.
    """
    s = penetration.series
    y = _clean_monotone(s.values - baseline)
    t = s.times - s.t0
    counter = _Counter()

    def model(t_arr, n_G0, k, delay, a):
        return n_G0 * np.exp(-k * np.exp(-2.0 * a * (t_arr - delay)))

    names = ["n_G0", "k"]
    if delay_fixed is None:
        names.append("delay")
    if a_fixed is None:
        names.append("a")

    def fun(x):
        p = dict(zip(names, x))
        d = delay_fixed if delay_fixed is not None else p["delay"]
        a = a_fixed if a_fixed is not None else p["a"]
        r = model(t, p["n_G0"], p["k"], d, a) - y
        return float(np.dot(r, r))

    starts = []
    for g0 in (0.4, 0.8):
        for k0 in (3.0, 9.0, 25.0):
            for a0 in (0.1, 0.3) if a_fixed is None else (None,):
                x0 = [g0, k0]
                if delay_fixed is None:
                    x0.append(0.0)
                if a_fixed is None:
                    x0.append(a0)
                starts.append(tuple(x0))
    x, loss = _simplex_search(fun, names, starts, counter)
    params = dict(zip(names, x))
    if a_fixed is not None:
        params["a"] = a_fixed
    if delay_fixed is not None:
        params["delay"] = delay_fixed
    return FitResult(
        parameters=params,
        loss=loss,
        n_evals=counter.n,
        converged=loss < 1e-6 or counter.n < 200_000,
        stage_losses={"penetration": loss},
    )


def fit_penetration(
    penetration: Dataset,
    a_fixed: Optional[float] = None,
    two_channel: Optional[bool] = None,
) -> FitResult:
    """Fit the full first-purchase penetration, one or two channels.

    The single-channel model is the innovation/imitation pool alone; the
    two-channel model adds the price-driven curve.  With ``two_channel``
    unset, both are fitted and the extra channel is kept only when it
    improves the fit decisively.
    """
    s = penetration.series
    y = _clean_monotone(s.values)
    t = s.times - s.t0
    counter = _Counter()
    # residuals in log space: proportional measurement error is the working
    # assumption, and the early near-zero stretch is what identifies the
    # innovation rate
    mask = y > 0
    log_y = np.log(y[mask])
    t_m = t[mask]

    def _log_ssr(m):
        if np.any(m <= 0):
            return 1e12
        r = np.log(m) - log_y
        return float(np.dot(r, r))

    def bass_only(x):
        return _log_ssr(bass_cumulative(t_m, BassParams(x[1], x[2], x[0])))

    bass_names = ["n_B0", "A", "B"]
    bass_starts = [
        (b0, a0, bb)
        for b0 in (0.2, 0.9)
        for a0 in (0.005, 0.05)
        for bb in (0.5, 2.0)
    ]
    results = {}
    if two_channel is not True:
        x, loss = _simplex_search(bass_only, bass_names, bass_starts, counter)
        results["one"] = (dict(zip(bass_names, x)), loss)
    if two_channel is not False:
        # delay pinned at zero: the shape and delay of the second channel
        # trade off exactly, so only the shape is fitted
        if a_fixed is None:
            names = bass_names + ["n_G0", "k", "a"]

            def fun(x):
                return _log_ssr(
                    bass_cumulative(t_m, BassParams(x[1], x[2], x[0]))
                    + x[3] * np.exp(-x[4] * np.exp(-2.0 * x[5] * t_m))
                )

            starts = [
                (0.2, 0.02, 2.0, g0, k0, a0)
                for g0 in (0.5, 0.9)
                for k0 in (3.0, 9.0, 25.0)
                for a0 in (0.1, 0.25)
            ]
        else:
            names = bass_names + ["n_G0", "k"]

            def fun(x):
                return _log_ssr(
                    bass_cumulative(t_m, BassParams(x[1], x[2], x[0]))
                    + x[3] * np.exp(-x[4] * np.exp(-2.0 * a_fixed * t_m))
                )

            starts = [
                (0.2, 0.02, 2.0, g0, k0)
                for g0 in (0.5, 0.9)
                for k0 in (3.0, 9.0, 25.0)
            ]
        x, loss = _simplex_search(fun, names, starts, counter)
        params = dict(zip(names, x))
        params["delay"] = 0.0
        if a_fixed is not None:
            params["a"] = a_fixed
        results["two"] = (params, loss)
    if two_channel is None:
        # keep the single-channel model unless the second channel clearly helps
        one_p, one_l = results["one"]
        two_p, two_l = results["two"]
        n = len(y)
        if one_l <= max(10.0 * two_l, 1e-10 * n):
            chosen, loss = one_p, one_l
        else:
            chosen, loss = two_p, two_l
    else:
        chosen, loss = results["one" if two_channel is False else "two"]
    return FitResult(
        parameters=chosen,
        loss=loss,
        n_evals=counter.n,
        converged=True,
        stage_losses={"penetration": loss},
    )


def _scenario_from_params(params: dict, launch_year: float, rep: dict) -> Scenario:
    has_g = "n_G0" in params
    return Scenario(
        name="fit",
        launch_year=launch_year,
        n_B0=params["n_B0"],
        A=params["A"],
        B=params["B"],
        n_G0=params.get("n_G0") if has_g else None,
        k=params.get("k") if has_g else None,
        a=params.get("a") if has_g else None,
        delay=params.get("delay", 0.0),
        R=rep.get("R", 0.0),
        Q=rep.get("Q", 0.0),
        t_p=rep.get("t_p"),
        R2=rep.get("R2", 0.0),
        Q2=rep.get("Q2", 0.0),
        t_p2=rep.get("t_p2"),
    )


def fit_plc(sales: Dataset, prior: FitResult) -> FitResult:
    """Fit the repurchase block of a full sales curve.

    ``prior`` must carry the diffusion parameters (from the penetration
    and price stages).  The repurchase parameters are then estimated by
    least squares on the assembled curve, with the overall scale profiled
    out analytically and reported as the market size.
    """
    s = sales.series
    if np.all(s.values == 0):
        raise DegenerateSeriesError("sales series is identically zero")
    base = prior.parameters
    for key in ("n_B0", "A", "B"):
        if key not in base:
            raise InvalidInputError(f"prior is missing diffusion parameter {key!r}")
    y = s.values
    t = s.times - s.t0
    horizon = float(t[-1])
    two = "n_G0" in base
    names = ["R", "Q", "t_p"] + (["R2", "Q2", "t_p2"] if two else [])
    if horizon < 2.0 * BOUNDS["t_p"][0]:
        raise HorizonError("sales series shorter than one replacement lifetime")
    counter = _Counter()

    def curve(rep: dict) -> np.ndarray:
        sc = _scenario_from_params(base, s.t0, rep)
        return assemble(sc, horizon, s.dt)["total"].values

    # log residuals with the scale profiled out additively; proportional
    # error assumption, same as the penetration stage
    mask = y > 0
    log_y = np.log(y[mask])

    def fun(x):
        rep = dict(zip(names, x))
        lifetimes_x = [rep["t_p"]] + ([rep["t_p2"]] if "t_p2" in rep else [])
        # lifetimes outside (2*dt, horizon) are unresolvable on this grid
        if any(tp > horizon or tp <= 2.0 * s.dt for tp in lifetimes_x):
            return 1e9
        m = curve(rep)[mask]
        if np.any(m <= 0):
            return 1e12
        r = np.log(m) - log_y
        r -= r.mean()
        return float(np.dot(r, r))

    lifetimes = [4.0, 8.0, 12.0, 16.0, 20.0]
    if two:
        starts = [(0.5, 0.05, tp, 0.5, 0.05, tp) for tp in lifetimes]
        starts += [(0.3, 0.05, 9.0, 0.6, 0.05, 11.0)]
    else:
        starts = [
            (r0, q0, tp)
            for r0 in (0.5, 1.2)
            for q0 in (0.05, 0.2)
            for tp in lifetimes
        ]
    x, loss = _simplex_search(fun, names, starts, counter, maxiter=2500)
    rep = dict(zip(names, x))
    m = curve(rep)[mask]
    scale = float(np.exp(np.mean(log_y - np.log(m))))
    params = dict(base)
    params.update(rep)
    params["M"] = scale
    return FitResult(
        parameters=params,
        loss=loss,
        n_evals=counter.n,
        converged=True,
        stage_losses={"sales": loss},
    )


def fit_pipeline(
    prices: Optional[Dataset] = None,
    penetration: Optional[Dataset] = None,
    sales: Optional[Dataset] = None,
    two_channel: Optional[bool] = None,
) -> FitResult:
    """Run the staged estimation over whatever series are available."""
    if prices is None and penetration is None and sales is None:
        raise InvalidInputError("nothing to fit: no input series")
    result = FitResult(parameters={}, loss=0.0, n_evals=0, converged=True)
    a_fixed = None
    if prices is not None:
        stage = fit_price_decline(prices)
        a_fixed = stage.parameters["a"]
        result = result.merged(stage)
    if penetration is not None:
        stage = fit_penetration(penetration, a_fixed=a_fixed, two_channel=two_channel)
        result = result.merged(stage)
    if sales is not None:
        if penetration is None:
            raise InvalidInputError(
                "sales fitting needs diffusion parameters from a penetration fit"
            )
        stage = fit_plc(sales, result)
        merged = dict(result.parameters)
        merged.update(stage.parameters)
        result = FitResult(
            parameters=merged,
            loss=result.loss + stage.loss,
            n_evals=result.n_evals + stage.n_evals,
            converged=result.converged and stage.converged,
            stage_losses={**result.stage_losses, **stage.stage_losses},
        )
    return result
