"""First-purchase curves: pool diffusion, price trajectory, expansion diffusion."""

import numpy as np
import pytest

from plckit import (
    BassParams,
    GompertzParams,
    MarketVolumeParams,
    PriceTrajectory,
    SalesSeries,
    bass_cumulative,
    bass_rate,
    gompertz_consistency,
    gompertz_cumulative,
    gompertz_rate,
    mean_price,
    price_function,
    shape_from_price,
)
from plckit.errors import DegenerateSeriesError, DomainError, InvalidParameterError

# the four bundled parameter sets (innovation, imitation, pool)
PARAM_SETS = [
    BassParams(0.02, 2.5, 0.18),
    BassParams(0.001, 1.8, 0.01),
    BassParams(0.004, 0.58, 1.0),
    BassParams(0.02, 0.5, 1.0),
]


class TestBassCumulative:
    def test_zero_at_launch(self):
        for p in PARAM_SETS:
            assert bass_cumulative(0.0, p) == 0.0

    def test_saturates_at_pool(self):
        for p in PARAM_SETS:
            horizon = 2000.0 / (p.innovation_rate + p.imitation_rate)
            assert bass_cumulative(horizon, p) == pytest.approx(
                p.initial_pool, rel=1e-9
            )

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            bass_cumulative(-0.1, PARAM_SETS[0])

    def test_rate_peak_at_log_ratio_time(self):
        p = BassParams(0.02, 0.5, 1.0)
        t_star = np.log(0.5 / 0.02) / 0.52  # 6.1898...
        grid = np.arange(0.0, 40.0, 1e-4)
        argmax = grid[np.argmax(bass_rate(grid, p))]
        assert argmax == pytest.approx(t_star, abs=2e-4)

    def test_pure_innovation_limit(self):
        p = BassParams(0.3, 0.3e-9, 0.8)
        t = np.linspace(0.0, 30.0, 301)
        limit = 0.8 * (1.0 - np.exp(-0.3 * t))
        assert np.max(np.abs(bass_cumulative(t, p) - limit)) < 1e-6

    def test_monotone_increasing(self):
        t = np.linspace(0.0, 40.0, 4001)
        for p in PARAM_SETS:
            assert np.all(np.diff(bass_cumulative(t, p)) >= 0)


class TestBassRate:
    def test_launch_rate(self):
        for p in PARAM_SETS:
            assert bass_rate(0.0, p) == pytest.approx(
                p.innovation_rate * p.initial_pool, rel=1e-12
            )

    def test_no_imitation_is_exponential_decay(self):
        p = BassParams(0.1, 0.0, 0.6)
        t = np.linspace(0.0, 20.0, 101)
        assert np.allclose(bass_rate(t, p), 0.06 * np.exp(-0.1 * t), rtol=1e-12)

    def test_peak_location(self):
        p = BassParams(0.02, 2.5, 0.18)
        t_star = np.log(125.0) / 2.52  # 1.9159...
        grid = np.arange(0.0, 15.0, 1e-4)
        argmax = grid[np.argmax(bass_rate(grid, p))]
        assert argmax == pytest.approx(t_star, abs=2e-4)

    def test_rate_is_derivative_of_cumulative(self):
        t = np.arange(0.01, 40.0, 0.01)
        h = 1e-5
        for p in PARAM_SETS:
            central = (bass_cumulative(t + h, p) - bass_cumulative(t - h, p)) / (2 * h)
            assert np.max(np.abs(bass_rate(t, p) - central)) < 1e-7


class TestMeanPrice:
    def test_launch_value(self):
        traj = PriceTrajectory(0.7, 0.3, 0.2)
        assert mean_price(0.0, traj) == pytest.approx(1.0, rel=1e-12)

    def test_no_decline_is_constant(self):
        traj = PriceTrajectory(0.7, 0.3, 0.0)
        t = np.linspace(0.0, 50.0, 51)
        assert np.all(mean_price(t, traj) == 1.0)

    def test_unit_offset_decay(self):
        traj = PriceTrajectory(1.0, 0.0, 0.2)
        assert mean_price(5.0, traj) == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_log_offset_affine_in_time(self):
        traj = PriceTrajectory(0.67, 0.33, 0.2)
        t = np.linspace(0.0, 30.0, 100)
        logs = np.log(mean_price(t, traj) - 0.33)
        slopes = np.diff(logs) / np.diff(t)
        assert np.max(np.abs(slopes + 0.2)) < 1e-12


class TestPriceFunction:
    def test_unit_at_launch_without_floor(self):
        series = SalesSeries(1948.0, 1.0, np.array([2.0, 1.5, 1.2, 1.0]))
        out = price_function(series, 0.0)
        assert out.values[0] == 1.0

    def test_floor_subtraction_recovers_decline(self):
        t = np.arange(0.0, 13.0, 1.0)
        p0 = 480.0
        series = SalesSeries(1948.0, 1.0, p0 * (0.33 + 0.67 * np.exp(-0.2 * t)))
        out = price_function(series, 0.33)
        assert np.allclose(out.values, 0.67 * np.exp(-0.2 * t), rtol=1e-12)

    def test_price_touching_floor_rejected(self):
        series = SalesSeries(0.0, 1.0, np.array([5.0, 3.0, 2.5, 2.0]))
        with pytest.raises(DegenerateSeriesError):
            price_function(series, 0.5)

    def test_floor_fraction_validated(self):
        series = SalesSeries(0.0, 1.0, np.array([2.0, 1.0]))
        with pytest.raises(InvalidParameterError):
            price_function(series, 1.0)


class TestGompertzCumulative:
    def test_saturation_limit(self):
        g = GompertzParams(0.77, 8.5, 0.2)
        assert gompertz_cumulative(200.0, g) == pytest.approx(0.77, rel=1e-12)

    def test_launch_value(self):
        g = GompertzParams(0.77, 8.5, 0.2)
        assert gompertz_cumulative(0.0, g) == pytest.approx(
            0.77 * np.exp(-8.5), rel=1e-12
        )

    def test_inflection_at_log_shape_time(self):
        g = GompertzParams(0.77, 8.5, 0.2)
        t_star = np.log(8.5) / 0.4  # 5.3498...
        grid = np.arange(0.0, 30.0, 1e-4)
        argmax = grid[np.argmax(gompertz_rate(grid, g))]
        assert argmax == pytest.approx(t_star, abs=2e-4)

    def test_monotone_and_bounded(self):
        g = GompertzParams(0.97, 27.0, 0.103)
        t = np.linspace(0.0, 80.0, 2001)
        vals = gompertz_cumulative(t, g)
        assert np.all(np.diff(vals) >= 0)
        assert np.all(vals <= 0.97)


class TestGompertzRate:
    def test_vanishes_at_saturation(self):
        g = GompertzParams(0.77, 8.5, 0.2)
        assert gompertz_rate(300.0, g) == pytest.approx(0.0, abs=1e-15)

    def test_zero_decline_rate_freezes_adoption(self):
        g = GompertzParams(0.77, 8.5, 0.0)
        t = np.linspace(0.0, 30.0, 31)
        assert np.all(gompertz_rate(t, g) == 0.0)

    def test_rate_is_derivative_of_cumulative(self):
        g = GompertzParams(0.97, 27.0, 0.103)
        t = np.linspace(0.0, 60.0, 601)
        h = 1e-5
        central = (gompertz_cumulative(t + h, g) - gompertz_cumulative(t, g)) / h
        fwd_err = np.max(np.abs(gompertz_rate(t + 0.5 * h, g) - central))
        assert fwd_err < 1e-7


class TestGompertzConsistency:
    def test_launch_at_natural_price(self):
        g = GompertzParams(0.9, 0.0, 0.15)
        mv = MarketVolumeParams(1.0, 0.1, 1.0, 1.0)
        traj = PriceTrajectory(0.0, 1.0, 0.15)
        assert gompertz_consistency(g, mv, traj) == pytest.approx(0.0, abs=1e-14)

    def test_linked_parameters_agree(self):
        mv = MarketVolumeParams(1.0, 0.1, 0.0, 1.0)
        traj = PriceTrajectory(2.0, 0.0, 0.1)
        k = shape_from_price(2.0, 1.0)
        assert k == pytest.approx(2.0, rel=1e-15)
        g = GompertzParams(mv.lower_fraction, k, 0.1)
        assert gompertz_consistency(g, mv, traj, t_max=50.0) <= 1e-10

    def test_zero_decline_rate_constant_sides(self):
        mv = MarketVolumeParams(1.0, 0.1, 0.0, 1.0)
        traj = PriceTrajectory(2.0, 0.0, 0.0)
        g = GompertzParams(mv.lower_fraction, 2.0, 0.0)
        assert gompertz_consistency(g, mv, traj) == pytest.approx(0.0, abs=1e-14)

    def test_unlinked_parameters_reported_large(self):
        mv = MarketVolumeParams(1.0, 0.1, 0.0, 1.0)
        traj = PriceTrajectory(2.0, 0.0, 0.1)
        g = GompertzParams(mv.lower_fraction, 3.0, 0.1)
        assert gompertz_consistency(g, mv, traj) > 1e-2
