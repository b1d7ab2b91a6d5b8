"""Trusted-aggregator baseline: exact billing, noise only toward the grid."""

import numpy as np
import pytest

from dpnct.aggregator import TariffConfig, bill_calculation
from dpnct.baseline import SCHEME_LABEL, bills_from_true_data, run_drdp
from dpnct.noise import NoiseScale

from .conftest import seeded_rng

TARIFF = TariffConfig(max_allowed_units=5500.0, unit_price=10.0, surcharge_price=20.0)


def small_dataset(seed, meters=5, timesteps=300):
    rng = seeded_rng(90, seed)
    return rng.uniform(0.1, 4.0, size=(meters, timesteps))


class TestBillsFromTrueData:
    def test_single_period_totals(self):
        readings = np.full((2, 10), 1.5)
        bills = bills_from_true_data(readings, TARIFF, billing_period_steps=10)
        assert len(bills) == 2
        assert all(b.consumed_units_masked == 15.0 and b.total == 150.0 for b in bills)

    def test_partial_final_period_split(self):
        readings = np.ones((1, 25))
        bills = bills_from_true_data(readings, TARIFF, billing_period_steps=10)
        assert [b.billing_period for b in bills] == [0, 1, 2]
        assert [b.consumed_units_masked for b in bills] == [10.0, 10.0, 5.0]

    def test_no_error_credits_ever(self):
        readings = small_dataset(0) * 2000.0
        bills = bills_from_true_data(readings, TARIFF, billing_period_steps=100)
        assert all(b.error_credit == 0.0 for b in bills)
        assert any(b.surcharge_units > 0.0 for b in bills)


class TestRunDrdp:
    def test_aggregator_receives_true_data(self):
        readings = small_dataset(1)
        run = run_drdp(readings, NoiseScale(10.0), TARIFF, seeded_rng(91))
        assert run.aggregator_input is run.true_series
        np.testing.assert_array_equal(run.true_series, readings)

    def test_grid_series_is_true_plus_noise(self):
        readings = small_dataset(2)
        run = run_drdp(readings, NoiseScale(10.0), TARIFF, seeded_rng(92))
        assert run.masked_series.shape == readings.shape
        assert not np.array_equal(run.masked_series, readings)

    def test_tiny_scale_masked_close_to_true(self):
        readings = small_dataset(3)
        run = run_drdp(readings, NoiseScale(1e-9), TARIFF, seeded_rng(93))
        np.testing.assert_allclose(run.masked_series, readings, atol=1e-6)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_bills_identical_to_noise_free_oracle(self, seed):
        # the billing path never touches noise, so statements must match the
        # independent noise-free computation exactly, field for field
        readings = small_dataset(seed) * 500.0
        run = run_drdp(readings, NoiseScale(10.0), TARIFF, seeded_rng(94, seed), billing_period_steps=100)
        assert run.bills == bills_from_true_data(readings, TARIFF, billing_period_steps=100)

    def test_bills_reduce_to_direct_bill_calculation(self):
        readings = np.array([[1.0] * 10, [600.0] * 10])
        run = run_drdp(readings, NoiseScale(5.0), TARIFF, seeded_rng(95), billing_period_steps=10)
        expected = bill_calculation({0: 10.0, 1: 6000.0}, TARIFF)
        assert run.bills == expected

    def test_deterministic_for_fixed_rng(self):
        readings = small_dataset(6)
        a = run_drdp(readings, NoiseScale(10.0), TARIFF, seeded_rng(96))
        b = run_drdp(readings, NoiseScale(10.0), TARIFF, seeded_rng(96))
        np.testing.assert_array_equal(a.masked_series, b.masked_series)

    def test_label(self):
        assert SCHEME_LABEL == "DRDP"
