"""Brand competition: replicator dynamics, micro supply/demand, price decline.

Brands with a lower price address a larger share of the consumer pool and
so carry a higher fitness; the replicator dynamics then shifts sales
toward them, which drags the sales-weighted mean price down toward the
natural price.  Near the natural price the decline is exponential with a
rate proportional to the price variance across brands.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidInputError, InvalidParameterError, StepSizeError
from .income_market import MarketVolumeParams, _volume_density_arr, volume_density

_MAX_HALVINGS = 30


@dataclass(frozen=True)
class BrandState:
    """One brand: its price, demand/supply coefficients, stock and sales."""

    price: float
    preference: float      # purchase success rate, 1/year
    reproduction: float    # excess-supply coefficient
    stock: float = 0.0     # available products, fraction of market potential
    sales: float = 0.0     # unit sales, fraction per year

    def __post_init__(self):
        if self.price <= 0:
            raise InvalidParameterError(f"price must be positive, got {self.price}")
        if self.preference <= 0:
            raise InvalidParameterError(
                f"preference must be positive, got {self.preference}"
            )
        if self.stock < 0 or self.sales < 0:
            raise InvalidParameterError("stock and sales must be non-negative")


@dataclass(frozen=True)
class MarketState:
    """Joint state of all brands plus the consumer pool.

    Brand attributes are stored as parallel arrays; ``brands`` rebuilds the
    per-brand view.  ``clock`` runs on the short (competition) timescale,
    related to calendar time by the scale factor ``epsilon``.
    """

    prices: np.ndarray
    preferences: np.ndarray
    reproductions: np.ndarray
    stocks: np.ndarray
    sales: np.ndarray
    volume_params: MarketVolumeParams
    consumer_pool: float = 0.0
    repurchase_rate: float = 0.0
    clock: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        for name in ("prices", "preferences", "reproductions", "stocks", "sales"):
            arr = getattr(self, name)
            # already-frozen arrays (from replace()) are shared, not re-copied
            if not (isinstance(arr, np.ndarray) and arr.dtype == float
                    and not arr.flags.writeable):
                arr = np.asarray(arr, dtype=float).copy()
                arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        n = len(self.prices)
        if any(
            len(getattr(self, name)) != n
            for name in ("preferences", "reproductions", "stocks", "sales")
        ):
            raise InvalidParameterError("brand arrays must have equal length")
        if self.sales.min(initial=0.0) < 0 or self.stocks.min(initial=0.0) < 0:
            raise InvalidParameterError("sales and stocks must be non-negative")
        if self.consumer_pool < 0:
            raise InvalidParameterError("consumer_pool must be non-negative")

    @classmethod
    def from_brands(
        cls,
        brands,
        volume_params: MarketVolumeParams,
        consumer_pool: float = 0.0,
        repurchase_rate: float = 0.0,
        epsilon: float = 1.0,
    ) -> "MarketState":
        brands = list(brands)
        return cls(
            prices=np.array([b.price for b in brands]),
            preferences=np.array([b.preference for b in brands]),
            reproductions=np.array([b.reproduction for b in brands]),
            stocks=np.array([b.stock for b in brands]),
            sales=np.array([b.sales for b in brands]),
            volume_params=volume_params,
            consumer_pool=consumer_pool,
            repurchase_rate=repurchase_rate,
            epsilon=epsilon,
        )

    @property
    def brands(self):
        return [
            BrandState(p, e, g, x, y)
            for p, e, g, x, y in zip(
                self.prices, self.preferences, self.reproductions, self.stocks, self.sales
            )
        ]

    @property
    def total_sales(self) -> float:
        return float(self.sales.sum())

    @property
    def shares(self) -> np.ndarray:
        return self.sales / self.total_sales

    @property
    def mean_price(self) -> float:
        """Sales-weighted mean price."""
        return float(np.dot(self.shares, self.prices))

    @property
    def price_variance(self) -> float:
        m = self.mean_price
        return float(np.dot(self.shares, (self.prices - m) ** 2))

    def pool_scale(self) -> float:
        """Pool prefactor tying the micro and reduced descriptions together.

        Recomputed from state as repurchase_rate over the stock-weighted
        preference sum; falls back to one when stocks carry no information.
        """
        denom = float(np.dot(self.preferences, self.stocks))
        if denom > 0 and self.repurchase_rate > 0:
            return self.repurchase_rate / denom
        return 1.0


def _advance(state: MarketState, clock: float, **updates) -> MarketState:
    """Copy a state with new field values, skipping re-validation.

    Hot-path variant of dataclasses.replace for fields the caller has
    already checked (non-negative sales/stocks/pool).
    """
    new = object.__new__(MarketState)
    d = new.__dict__
    d.update(state.__dict__)
    for name, value in updates.items():
        if isinstance(value, np.ndarray) and value.flags.writeable:
            value.flags.writeable = False
        d[name] = value
    d["clock"] = clock
    if "stocks" in updates:
        d.pop("_fitness_memo", None)
    return new


def fitness(brand: BrandState, mv: MarketVolumeParams, pool_scale: float) -> float:
    """Growth-rate potential of a brand: preference x reproduction x pool."""
    return (
        brand.preference
        * brand.reproduction
        * pool_scale
        * volume_density(brand.price, mv)
    )


def _fitness_array(state: MarketState, pool_scale: float) -> np.ndarray:
    f = _volume_density_arr(state.prices, state.volume_params)
    f *= state.preferences
    f *= state.reproductions
    f *= pool_scale
    return f


def _relative_growth_step(values: np.ndarray, f: np.ndarray, dtau: float) -> np.ndarray:
    """One midpoint step of dv/dtau = (f - <f>) v, conserving sum(v).

    The mean fitness in the increment is recomputed from the half state and
    the increment multiplies the half state, so the total is conserved
    identically up to roundoff; a final rescale removes that roundoff.
    """
    total = values.sum()

    def attempt(v: np.ndarray, h: float, v_total: float) -> np.ndarray:
        w = np.dot(v, f) / v_total
        half = v * (1.0 + 0.5 * h * (f - w))
        w_half = np.dot(half, f) / half.sum()
        return v + h * (f - w_half) * half

    h = dtau
    n_sub = 1
    for _ in range(_MAX_HALVINGS):
        out = values
        out_total = total
        ok = True
        for _ in range(n_sub):
            out = attempt(out, h, out_total)
            if out.min() < 0:
                ok = False
                break
            out_total = out.sum()
        if ok:
            return out * (total / out_total)
        h *= 0.5
        n_sub *= 2
    raise StepSizeError("step halving failed to keep the state non-negative")


def replicator_step(state: MarketState, dtau: float, pool_scale=None) -> MarketState:
    """Advance brand sales one step of the relative-fitness dynamics.

    Total sales are conserved; the step must satisfy
    ``dtau * max|f - <f>| < 0.1``.
    """
    total = state.sales.sum()
    if total <= 0:
        raise InvalidInputError("total sales must be positive")
    if pool_scale is None:
        pool_scale = state.pool_scale()
    # prices and coefficients are immutable between stock updates, so the
    # fitness array is memoized on the state and carried by _advance
    memo = state.__dict__.get("_fitness_memo")
    if memo is not None and memo[0] == pool_scale:
        f = memo[1]
    else:
        f = _fitness_array(state, pool_scale)
        f.flags.writeable = False
        object.__setattr__(state, "_fitness_memo", (pool_scale, f))
    w = np.dot(state.sales, f) / total
    if dtau * np.max(np.abs(f - w)) >= 0.1:
        raise StepSizeError(
            "dtau violates the stability bound dtau * max|f - <f>| < 0.1"
        )
    sales = _relative_growth_step(state.sales, f, dtau)
    return _advance(state, state.clock + dtau, sales=sales)


def micro_step(state: MarketState, dtau: float) -> MarketState:
    """Advance stocks and the consumer pool by the supply/demand balance.

    Stocks grow with excess supply, sales follow the purchase-event
    frequency, and the pool balances the demand rate against total sales.
    """
    mv = state.volume_params

    def rates(stocks, pool):
        sales = state.preferences * stocks * pool * volume_density(state.prices, mv)
        yt = sales.sum()
        if yt > 0:
            mean_mu = np.dot(sales / yt, state.prices)
        else:
            mean_mu = float(np.mean(state.prices))
        dx = state.reproductions * sales
        dpool = state.repurchase_rate * volume_density(mean_mu, mv) - yt
        return sales, dx, dpool

    h = dtau
    n_sub = 1
    for _ in range(_MAX_HALVINGS):
        stocks = state.stocks.copy()
        pool = state.consumer_pool
        ok = True
        for _ in range(n_sub):
            _, dx, dpool = rates(stocks, pool)
            half_stocks = stocks + 0.5 * h * dx
            half_pool = pool + 0.5 * h * dpool
            if half_pool < 0 or np.any(half_stocks < 0):
                ok = False
                break
            _, dx2, dpool2 = rates(half_stocks, half_pool)
            stocks = stocks + h * dx2
            pool = pool + h * dpool2
            if pool < 0 or np.any(stocks < 0):
                ok = False
                break
        if ok:
            sales, _, _ = rates(stocks, pool)
            return _advance(
                state, state.clock + dtau,
                stocks=stocks, consumer_pool=pool, sales=sales,
            )
        h *= 0.5
        n_sub *= 2
    raise StepSizeError("micro step produced negative stock or pool at minimal step")


@dataclass(frozen=True)
class PriceHistogram:
    """Sales-frequency distribution over price bins; masses sum to one."""

    bin_edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        edges = self.bin_edges
        if not (isinstance(edges, np.ndarray) and edges.dtype == float
                and not edges.flags.writeable):
            edges = np.asarray(edges, dtype=float).copy()
        masses = np.asarray(self.masses, dtype=float).copy()
        if len(edges) != len(masses) + 1:
            raise InvalidParameterError("need len(bin_edges) == len(masses) + 1")
        if np.any(np.diff(edges) <= 0):
            raise InvalidParameterError("bin_edges must be strictly increasing")
        if np.any(masses < 0):
            raise InvalidParameterError("masses must be non-negative")
        if abs(masses.sum() - 1.0) > 1e-9:
            raise InvalidParameterError("masses must sum to one")
        edges.flags.writeable = False
        masses.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "masses", masses)

    @property
    def centers(self) -> np.ndarray:
        try:
            return self._centers
        except AttributeError:
            c = 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])
            c.flags.writeable = False
            object.__setattr__(self, "_centers", c)
            return c

    @property
    def mean(self) -> float:
        return float(np.dot(self.masses, self.centers))

    @property
    def variance(self) -> float:
        return float(np.dot(self.masses, (self.centers - self.mean) ** 2))


def price_histogram_step(
    h: PriceHistogram,
    mv: MarketVolumeParams,
    fitness_scale: float,
    dtau: float,
) -> PriceHistogram:
    """Advance the price distribution by the relative-fitness dynamics.

    Bin fitness is ``fitness_scale * volume_density(center)``.  The update
    conserves total mass without renormalizing.
    """
    memo = h.__dict__.get("_density_memo")
    if memo is not None and memo[0] is mv:
        density = memo[1]
    else:
        density = _volume_density_arr(h.centers, mv)
        density.flags.writeable = False
        object.__setattr__(h, "_density_memo", (mv, density))
    f = fitness_scale * density
    w = np.dot(h.masses, f)
    if dtau * np.max(np.abs(f - w)) >= 0.1:
        raise StepSizeError(
            "dtau violates the stability bound dtau * max|f - <f>| < 0.1"
        )
    masses = h.masses
    half = masses * (1.0 + 0.5 * dtau * (f - w))
    w_half = np.dot(half, f) / half.sum()
    new = masses + dtau * (f - w_half) * half
    if np.any(new < 0):
        left = price_histogram_step(h, mv, fitness_scale, 0.5 * dtau)
        return price_histogram_step(left, mv, fitness_scale, 0.5 * dtau)
    out = object.__new__(PriceHistogram)
    new.flags.writeable = False
    object.__setattr__(out, "bin_edges", h.bin_edges)
    object.__setattr__(out, "masses", new)
    object.__setattr__(out, "_centers", h.centers)
    object.__setattr__(out, "_density_memo", (mv, density))
    return out


def rescale_histogram(h: PriceHistogram, target_variance: float) -> PriceHistogram:
    """Stretch the price distribution about its mean to a target variance.

    Used to hold the cross-brand price variance at a set level over long
    runs, the near-constant-variance regime in which the exponential mean
    price decline emerges.  The masses are remapped through the piecewise
    linear distribution function; tail mass pushed past the bin range is
    folded into the end bins.
    """
    if target_variance <= 0:
        raise InvalidParameterError("target_variance must be positive")
    var = h.variance
    if var <= 0:
        raise InvalidParameterError("cannot rescale a zero-variance histogram")
    scale = np.sqrt(target_variance / var)
    mean = h.mean
    cdf = np.concatenate([[0.0], np.cumsum(h.masses)])
    cdf /= cdf[-1]
    pre_edges = mean + (h.bin_edges - mean) / scale
    new_cdf = np.interp(pre_edges, h.bin_edges, cdf, left=0.0, right=1.0)
    masses = np.diff(new_cdf)
    masses[0] += new_cdf[0]
    masses[-1] += 1.0 - new_cdf[-1]
    return PriceHistogram(h.bin_edges, masses / masses.sum())


def mean_price_ode(
    mu_init: float,
    mv: MarketVolumeParams,
    micro: dict,
    t_grid: np.ndarray,
) -> np.ndarray:
    """Integrate the reduced mean-price equation on the calendar grid.

    ``micro`` supplies ``epsilon``, ``mean_eta_gamma_psi0`` and
    ``price_variance``; the implied decline rate is
    ``epsilon * mean_eta_gamma_psi0 * lower_fraction * variance / width**2``.
    """
    var = micro["price_variance"]
    if var < 0:
        raise InvalidParameterError("price_variance must be non-negative")
    rate = (
        micro.get("epsilon", 1.0)
        * micro["mean_eta_gamma_psi0"]
        * mv.lower_fraction
        * var
        / mv.width**2
    )
    t_grid = np.asarray(t_grid, dtype=float)
    if rate == 0 or mu_init == mv.natural_price:
        return np.full_like(t_grid, mu_init, dtype=float)
    sol = solve_ivp(
        lambda t, mu: -rate * (mu - mv.natural_price),
        (t_grid[0], t_grid[-1]),
        [mu_init],
        t_eval=t_grid,
        rtol=1e-12,
        atol=1e-14,
        method="DOP853",
    )
    return sol.y[0]


def decline_rate_from_micro(mv: MarketVolumeParams, micro: dict) -> float:
    """Closed-form decline rate implied by the micro parameters."""
    return (
        micro.get("epsilon", 1.0)
        * micro["mean_eta_gamma_psi0"]
        * mv.lower_fraction
        * micro["price_variance"]
        / mv.width**2
    )


def fisher_pry(t_grid, advantage: float, offset: float) -> np.ndarray:
    """Closed-form logistic market share under a constant fitness advantage.

    The log share ratio is affine in time: ln(m1/m2) = advantage*t + offset.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    return 1.0 / (1.0 + np.exp(-(advantage * t_grid + offset)))


def fisher_pry_ode(t_grid, advantage: float, m1_init: float) -> np.ndarray:
    """Integrate the two-population substitution dynamics numerically."""
    if not 0 < m1_init < 1:
        raise InvalidParameterError(f"m1_init must lie in (0, 1), got {m1_init}")
    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(
        lambda t, m: advantage * m * (1.0 - m),
        (t_grid[0], t_grid[-1]),
        [m1_init],
        t_eval=t_grid,
        rtol=1e-12,
        atol=1e-14,
        method="DOP853",
    )
    return sol.y[0]


def run_replicator(
    state: MarketState,
    dtau: float,
    n_steps: int,
    record_every: int = 1,
    jump_rate: float = 0.0,
    jump_sigma: float = 0.01,
    recenter_jumps: bool = False,
    hold_price_variance: bool = False,
    rng: np.random.Generator | None = None,
):
    """Run the sales replicator, optionally with price-jump noise.

    Price jumps model rare multiplicative changes of the brand prices
    (Poisson-timed, lognormal magnitude).  ``recenter_jumps`` removes the
    sales-weighted mean shift of each jump batch, so the jumps mix brands
    across the price axis without moving the mean price themselves; the
    decline then comes from selection alone.  ``hold_price_variance``
    rescales prices around the running mean after each step so the
    cross-brand price variance stays at its initial value, the
    near-constant-variance regime in which the exponential decline emerges.

    Returns a dict of trajectory arrays keyed by ``tau``, ``mean_price``,
    ``price_variance``, ``shares``, ``prices``.
    """
    if jump_rate > 0 and rng is None:
        raise InvalidParameterError("jump_rate > 0 requires an rng")
    var_target = state.price_variance
    taus, means, variances, shares, prices = [], [], [], [], []

    def record(s):
        taus.append(s.clock)
        means.append(s.mean_price)
        variances.append(s.price_variance)
        shares.append(s.shares.copy())
        prices.append(s.prices.copy())

    record(state)
    for step in range(n_steps):
        state = replicator_step(state, dtau)
        new_prices = None
        w = state.shares
        if jump_rate > 0:
            hits = rng.random(len(state.prices)) < jump_rate * dtau
            if np.any(hits):
                factors = np.where(
                    hits, np.exp(rng.normal(0.0, jump_sigma, len(state.prices))), 1.0
                )
                new_prices = state.prices * factors
                if recenter_jumps:
                    new_prices += float(np.dot(w, state.prices - new_prices))
        if hold_price_variance:
            p = state.prices if new_prices is None else new_prices
            m = float(np.dot(w, p))
            var = float(np.dot(w, (p - m) ** 2))
            if var > 0:
                new_prices = m + (p - m) * np.sqrt(var_target / var)
        if new_prices is not None:
            state = replace(state, prices=new_prices)
        if (step + 1) % record_every == 0 or step == n_steps - 1:
            record(state)
    return {
        "tau": np.array(taus),
        "mean_price": np.array(means),
        "price_variance": np.array(variances),
        "shares": np.array(shares),
        "prices": np.array(prices),
    }
