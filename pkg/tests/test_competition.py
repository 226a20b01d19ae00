"""Brand competition, price-distribution dynamics, and logistic substitution."""

import numpy as np
import pytest
from scipy import stats

from plckit import (
    BrandState,
    MarketState,
    MarketVolumeParams,
    PriceHistogram,
    decline_rate_from_micro,
    fisher_pry,
    fisher_pry_ode,
    fitness,
    mean_price_ode,
    micro_step,
    price_histogram_step,
    replicator_step,
    rescale_histogram,
    run_replicator,
)
from plckit.errors import InvalidParameterError, StepSizeError

MV = MarketVolumeParams(1.0, 0.0, 1.0, 1.0)


def make_state(prices, sales, preferences=None, reproductions=None, **kwargs):
    prices = np.asarray(prices, dtype=float)
    n = len(prices)
    return MarketState(
        prices=prices,
        preferences=np.ones(n) if preferences is None else np.asarray(preferences),
        reproductions=np.ones(n) if reproductions is None else np.asarray(reproductions),
        stocks=kwargs.pop("stocks", np.zeros(n)),
        sales=np.asarray(sales, dtype=float),
        volume_params=kwargs.pop("volume_params", MV),
        **kwargs,
    )


def gaussian_state(n, offset, variance, mv=MV):
    qs = (np.arange(n) + 0.5) / n
    prices = stats.norm.ppf(qs, loc=mv.natural_price + offset, scale=np.sqrt(variance))
    return make_state(prices, np.full(n, 1.0 / n), volume_params=mv)


class TestFitness:
    def test_zero_reproduction(self):
        b = BrandState(price=1.5, preference=1.0, reproduction=0.0)
        assert fitness(b, MV, 1.0) == 0.0

    def test_maximal_at_natural_price(self):
        b = BrandState(price=1.0, preference=0.8, reproduction=0.7)
        assert fitness(b, MV, 2.0) == pytest.approx(0.8 * 0.7 * 2.0, rel=1e-12)

    def test_one_width_above(self):
        b = BrandState(price=2.0, preference=1.0, reproduction=0.05)
        assert fitness(b, MV, 1.0) == pytest.approx(0.05 * np.exp(-0.5), rel=1e-12)


class TestReplicatorStep:
    def test_equal_fitness_unchanged(self):
        state = make_state([1.4, 1.4, 1.4], [0.2, 0.3, 0.5])
        out = replicator_step(state, 0.05)
        assert np.allclose(out.sales, state.sales, atol=1e-15)

    def test_single_brand_unchanged(self):
        state = make_state([1.2], [0.7])
        out = replicator_step(state, 0.05)
        assert out.sales[0] == pytest.approx(0.7, rel=1e-15)

    def test_two_brand_logistic_crossing(self):
        # relative fitness 0.5 turns a 10% share into 50% at tau = ln(9)/0.5
        state = make_state(
            [1.0, 1.0], [0.1, 0.9], preferences=[1.0, 0.5], reproductions=[1.0, 1.0]
        )
        tau_end = np.log(9.0) / 0.5
        n_steps = 5000
        dtau = tau_end / n_steps
        for _ in range(n_steps):
            state = replicator_step(state, dtau)
        assert state.shares[0] == pytest.approx(0.5, abs=1e-6)

    def test_total_sales_conserved(self):
        state = gaussian_state(20, 0.4, 1e-3)
        total = state.total_sales
        for _ in range(200):
            state = replicator_step(state, 0.5)
        assert state.total_sales == pytest.approx(total, rel=1e-13)
        assert np.all(state.sales >= 0)
        assert state.shares.sum() == pytest.approx(1.0, abs=1e-12)

    def test_stability_bound_enforced(self):
        state = make_state([1.0, 4.0], [0.5, 0.5])
        with pytest.raises(StepSizeError):
            replicator_step(state, 1.0)

    def test_fittest_share_monotone(self):
        state = gaussian_state(10, 0.3, 4e-4)
        best = np.argmax(-state.prices)
        last = state.shares[best]
        for _ in range(500):
            state = replicator_step(state, 0.5)
            assert state.shares[best] >= last - 1e-15
            last = state.shares[best]


class TestMicroStep:
    def test_stationary_fixed_point(self):
        # no reproduction and demand balancing total sales freeze the state
        state = make_state(
            [1.0, 1.0],
            [0.0, 0.0],
            reproductions=[0.0, 0.0],
            stocks=np.array([0.25, 0.25]),
            consumer_pool=1.0,
            repurchase_rate=0.5,
        )
        out = micro_step(state, 0.01)
        assert out.consumer_pool == pytest.approx(1.0, rel=1e-12)
        assert np.allclose(out.stocks, state.stocks)

    def test_empty_pool_freezes_sales(self):
        state = make_state(
            [1.2, 1.3],
            [0.0, 0.0],
            stocks=np.array([0.5, 0.5]),
            consumer_pool=0.0,
            repurchase_rate=0.0,
        )
        out = micro_step(state, 0.01)
        assert np.all(out.sales == 0.0)
        assert np.allclose(out.stocks, state.stocks)

    def test_micro_matches_replicator_shares(self):
        # with equal eta*gamma products the micro shares track the replicator
        prices = np.array([1.05, 1.25])
        stocks = np.array([0.5, 0.5])
        micro = make_state(
            prices,
            np.zeros(2),
            stocks=stocks,
            consumer_pool=0.05,
            repurchase_rate=0.05,
            reproductions=np.full(2, 0.02),
        )
        micro = micro_step(micro, 0.0)  # populate sales from stocks and pool
        repl = make_state(prices, micro.sales.copy(), reproductions=np.full(2, 0.02))
        dtau = 0.05
        for _ in range(1000):
            micro = micro_step(micro, dtau)
            repl = replicator_step(repl, dtau, pool_scale=micro.pool_scale())
            assert abs(micro.shares[0] - repl.shares[0]) < 1e-3

    def test_lower_priced_brand_gains(self):
        state = make_state(
            [1.1, 1.5],
            np.zeros(2),
            stocks=np.array([0.5, 0.5]),
            consumer_pool=0.1,
            repurchase_rate=0.1,
            reproductions=np.full(2, 0.05),
        )
        state = micro_step(state, 0.0)
        last = state.shares[0]
        for _ in range(1000):
            state = micro_step(state, 0.1)
            assert state.shares[0] >= last - 1e-12
            last = state.shares[0]
        assert state.shares[0] > 0.5


class TestPriceHistogram:
    def test_single_bin_unchanged(self):
        h = PriceHistogram(np.array([1.0, 1.2]), np.array([1.0]))
        out = price_histogram_step(h, MV, 1.0, 0.5)
        assert np.allclose(out.masses, h.masses)

    def test_equal_fitness_bins_unchanged(self):
        # every bin below the natural price sees the full market volume
        h = PriceHistogram(np.array([0.3, 0.5, 0.7, 0.9]), np.array([0.5, 0.2, 0.3]))
        out = price_histogram_step(h, MV, 1.0, 0.5)
        assert np.allclose(out.masses, h.masses, atol=1e-15)

    def test_mass_conserved(self):
        edges = np.linspace(1.0, 2.0, 51)
        masses = np.exp(-np.linspace(0, 3, 50))
        h = PriceHistogram(edges, masses / masses.sum())
        for _ in range(200):
            h = price_histogram_step(h, MV, 1.0, 0.2)
            assert h.masses.sum() == pytest.approx(1.0, abs=1e-12)

    def test_mean_price_declines_exponentially(self):
        # near-Gaussian distribution with held variance follows the
        # closed-form exponential with rate = variance (scaled units)
        sigma = 0.02
        var0 = sigma**2
        offset = 0.5
        edges = np.arange(1.05, 1.65001, 0.002)
        centers = 0.5 * (edges[:-1] + edges[1:])
        m = np.exp(-((centers - (1.0 + offset)) ** 2) / (2 * var0))
        h = PriceHistogram(edges, m / m.sum())
        dtau = 0.5
        n = int(round(1.0 / var0 / dtau))
        mus = [h.mean]
        for _ in range(n):
            h = price_histogram_step(h, MV, 1.0, dtau)
            h = rescale_histogram(h, var0)
            mus.append(h.mean)
        tau = np.arange(n + 1) * dtau
        predicted = offset * np.exp(-var0 * tau) + 1.0
        err = np.abs(np.array(mus) - predicted) / predicted
        assert err.max() < 0.02

    def test_rescale_validates(self):
        h = PriceHistogram(np.array([1.0, 1.2]), np.array([1.0]))
        with pytest.raises(InvalidParameterError):
            rescale_histogram(h, 1e-4)


class TestMeanPriceOde:
    def test_zero_variance_constant(self):
        micro = {"epsilon": 1.0, "mean_eta_gamma_psi0": 1.0, "price_variance": 0.0}
        t = np.linspace(0.0, 50.0, 11)
        out = mean_price_ode(1.7, MV, micro, t)
        assert np.all(out == 1.7)

    def test_natural_price_fixed_point(self):
        micro = {"epsilon": 1.0, "mean_eta_gamma_psi0": 1.0, "price_variance": 1e-3}
        t = np.linspace(0.0, 50.0, 11)
        out = mean_price_ode(MV.natural_price, MV, micro, t)
        assert np.all(out == MV.natural_price)

    def test_matches_closed_form_at_given_rate(self):
        # micro parameters scaled so the decline rate is 0.103
        micro = {"epsilon": 1.0, "mean_eta_gamma_psi0": 0.103 / 1e-3, "price_variance": 1e-3}
        assert decline_rate_from_micro(MV, micro) == pytest.approx(0.103, rel=1e-12)
        t = np.linspace(0.0, 40.0, 81)
        out = mean_price_ode(2.0, MV, micro, t)
        closed = 1.0 + 1.0 * np.exp(-0.103 * t)
        assert np.max(np.abs(out - closed)) < 1e-9


class TestFisherPry:
    def test_zero_advantage_constant(self):
        t = np.linspace(0.0, 20.0, 21)
        out = fisher_pry(t, 0.0, -1.0)
        assert np.allclose(out, out[0])

    def test_symmetric_at_origin(self):
        assert fisher_pry(0.0, 0.5, 0.0) == pytest.approx(0.5, rel=1e-12)

    def test_crossing_time(self):
        t_half = np.log(9.0) / 0.5
        assert fisher_pry(t_half, 0.5, np.log(1.0 / 9.0)) == pytest.approx(
            0.5, rel=1e-12
        )

    def test_ode_agrees_with_closed_form(self):
        t = np.linspace(0.0, 20.0, 401)
        for theta in (0.1, 0.5, 1.0):
            closed = fisher_pry(t, theta, np.log(1.0 / 9.0))
            integrated = fisher_pry_ode(t, theta, closed[0])
            assert np.max(np.abs(integrated - closed)) <= 1e-8


class TestEmergentDecline:
    def test_two_timescale_consistency(self):
        # relative-fitness dynamics near the natural price against the
        # reduced mean-price equation
        var0 = 4e-4
        state = gaussian_state(50, 0.1, var0)
        out = run_replicator(
            state,
            0.5,
            1500,
            record_every=10,
            jump_rate=1.0,
            jump_sigma=5e-3,
            recenter_jumps=True,
            hold_price_variance=True,
            rng=np.random.default_rng(11),
        )
        micro = {"epsilon": 1.0, "mean_eta_gamma_psi0": 1.0, "price_variance": var0}
        predicted = mean_price_ode(out["mean_price"][0], MV, micro, out["tau"])
        err = np.abs(out["mean_price"] - predicted) / predicted
        assert err.max() < 0.01

    def test_decline_rate_scales_with_variance(self):
        rates = []
        variances = (1e-4, 4e-4, 1e-3)
        for var in variances:
            state = gaussian_state(50, 0.1, var)
            stepped = replicator_step(state, 0.5)
            rates.append(
                -(
                    np.log(stepped.mean_price - 1.0)
                    - np.log(state.mean_price - 1.0)
                )
                / 0.5
            )
        v = np.asarray(variances)
        r = np.asarray(rates)
        slope = np.dot(v, r) / np.dot(v, v)
        assert slope == pytest.approx(1.0, rel=0.05)
        assert np.max(np.abs(r - slope * v) / r) < 0.05
