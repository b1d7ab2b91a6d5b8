"""Trial and scenario orchestration: determinism, overrides, file outputs."""

import json

import numpy as np
import pytest

from dpnct.aggregator import TariffConfig
from dpnct.baseline import bills_from_true_data
from dpnct.config import SimulationConfig
from dpnct.data import LoadDataset, generate_synthetic, read_results_csv
from dpnct.errors import ConfigError
from dpnct.meter import SurchargeErrorReport
from dpnct.simulation import (
    METRIC_ORDER,
    _run_billing,
    load_scenario_dataset,
    run_dpnct_trial,
    run_drdp_trial,
    run_scenario,
)

from .conftest import seeded_rng

TARIFF = TariffConfig(max_allowed_units=5500.0, unit_price=10.0, surcharge_price=20.0)

SMALL_CONFIG = dict(
    households=12,
    days=1,
    groups=3,
    schemes=("hourly", "drdp"),
    seeds=(0, 1),
)


def small_dataset(households=12, days=1, seed=8):
    return generate_synthetic(households, days, seeded_rng(80, seed))


class TestDpnctTrial:
    def test_zero_noise_override_reduces_to_plain_metering(self):
        ds = small_dataset()
        output = run_dpnct_trial(
            ds,
            "hourly",
            epsilon=1.0,
            num_groups=3,
            tariff=TARIFF,
            seed=0,
            injected_override=np.zeros_like(ds.readings),
        )
        assert output.result.mae_total_consumption == 0.0
        assert output.result.mae_bill == 0.0
        assert output.result.correlation == 1.0
        assert output.bills == bills_from_true_data(ds.readings, TARIFF)
        np.testing.assert_array_equal(output.masked_sum, output.true_total)

    def test_deterministic_per_seed(self):
        ds = small_dataset()
        a = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=5)
        b = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=5)
        assert a.result == b.result
        np.testing.assert_array_equal(a.reconstructed, b.reconstructed)

    def test_seeds_and_schemes_use_distinct_streams(self):
        ds = small_dataset()
        base = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=0)
        other_seed = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=1)
        other_scheme = run_dpnct_trial(ds, "daily", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=0)
        assert not np.array_equal(base.masked_sum, other_seed.masked_sum)
        assert not np.array_equal(base.masked_sum, other_scheme.masked_sum)

    def test_net_mode_reconstruction_is_exact(self):
        ds = small_dataset()
        output = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=2)
        np.testing.assert_allclose(output.reconstructed, output.true_total, rtol=1e-9, atol=1e-9)

    def test_literal_submission_mode_breaks_reconstruction(self):
        # submitting raw injections instead of net noise leaves the cancelled
        # noise uncorrected from the second cancellation period onward
        ds = small_dataset()
        output = run_dpnct_trial(
            ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=2, noise_mode="literal-alg2"
        )
        period = 6
        np.testing.assert_allclose(
            output.reconstructed[:period], output.true_total[:period], rtol=1e-9, atol=1e-9
        )
        assert np.max(np.abs(output.reconstructed[period:] - output.true_total[period:])) > 1.0

    def test_composed_budget_uses_larger_scale(self):
        ds = small_dataset()
        per_reading = run_dpnct_trial(ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=3)
        composed = run_dpnct_trial(
            ds, "hourly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=3, budget_mode="composed"
        )
        assert composed.result.mae_total_consumption > per_reading.result.mae_total_consumption

    def test_injected_override_shape_checked(self):
        ds = small_dataset()
        with pytest.raises(ValueError):
            run_dpnct_trial(
                ds,
                "hourly",
                epsilon=1.0,
                num_groups=3,
                tariff=TARIFF,
                seed=0,
                injected_override=np.zeros((2, 2)),
            )

    def test_scheme_label_on_result(self):
        ds = small_dataset()
        output = run_dpnct_trial(ds, "weekly", epsilon=1.0, num_groups=3, tariff=TARIFF, seed=0)
        assert output.result.scheme == "DPNCT-Weekly"


class TestDrdpTrial:
    def test_privacy_interface_sees_true_data(self):
        ds = small_dataset()
        output = run_drdp_trial(ds, epsilon=1.0, tariff=TARIFF, seed=0)
        assert output.result.correlation == 1.0
        assert output.result.mae_bill == 0.0
        assert "correlation_grid" in output.extra_metrics
        assert abs(output.extra_metrics["correlation_grid"]) < 1.0

    def test_bills_match_noise_free_oracle(self):
        ds = small_dataset()
        output = run_drdp_trial(ds, epsilon=1.0, tariff=TARIFF, seed=1)
        assert output.bills == bills_from_true_data(ds.readings, TARIFF)


class TestRunBilling:
    def test_surcharge_error_credited_next_period(self):
        # one meter, two 5-step periods; noise pushes period 0 over the cap
        # by 30 units, which comes back as a credit on the period 1 bill
        tariff = TariffConfig(max_allowed_units=100.0, unit_price=1.0, surcharge_price=2.0)
        masked = np.array([[20.0, 20.0, 20.0, 20.0, 50.0, 10.0, 10.0, 10.0, 10.0, 10.0]])
        net = np.array([[0.0, 0.0, 0.0, 0.0, 30.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
        bills, leftover = _run_billing(masked, net, tariff, billing_period_steps=5)
        first, second = bills
        assert first.surcharge_units == 30.0
        assert first.total == 100.0 + 60.0
        assert second.error_credit == 60.0
        assert second.total == 50.0 - 60.0
        assert leftover == {}

    def test_floored_units_carried_forward(self):
        tariff = TariffConfig(max_allowed_units=100.0, unit_price=1.0, surcharge_price=2.0)
        masked = np.array([[-4.0, 1.0]])
        net = np.array([[-5.0, 0.0]])
        bills, _ = _run_billing(masked, net, tariff, billing_period_steps=1)
        first, second = bills
        assert first.floored_units == 4.0
        assert first.total == 0.0
        assert second.error_credit == 8.0

    def test_last_period_report_returned(self):
        tariff = TariffConfig(max_allowed_units=10.0, unit_price=1.0, surcharge_price=2.0)
        masked = np.array([[15.0]])
        net = np.array([[5.0]])
        _, reports = _run_billing(masked, net, tariff, billing_period_steps=1)
        assert reports == {
            0: SurchargeErrorReport(meter_id=0, billing_period=0, error_units=5.0)
        }


class TestScenario:
    def test_rows_deterministic_and_ordered(self, tmp_path):
        config = SimulationConfig(**SMALL_CONFIG, output_dir=str(tmp_path / "a"))
        first = run_scenario(config)
        second = run_scenario(config, output_dir=tmp_path / "b")
        assert first.rows == second.rows
        hourly_rows = [r for r in first.rows if r[0] == "DPNCT-Hourly" and r[1] == 0]
        assert [r[2] for r in hourly_rows] == list(METRIC_ORDER)
        drdp_rows = [r for r in first.rows if r[0] == "DRDP" and r[1] == 0]
        assert [r[2] for r in drdp_rows] == list(METRIC_ORDER) + ["correlation_grid"]

    def test_results_csv_round_trip(self, tmp_path):
        config = SimulationConfig(**SMALL_CONFIG, output_dir=str(tmp_path))
        result = run_scenario(config)
        assert result.results_path == tmp_path / "results.csv"
        assert read_results_csv(result.results_path) == result.rows

    def test_byte_identical_reruns(self, tmp_path):
        config = SimulationConfig(**SMALL_CONFIG)
        run_scenario(config, output_dir=tmp_path / "a")
        run_scenario(config, output_dir=tmp_path / "b")
        assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()

    def test_metadata_written(self, tmp_path):
        config = SimulationConfig(**SMALL_CONFIG)
        run_scenario(config, output_dir=tmp_path)
        metadata = json.loads((tmp_path / "results_metadata.json").read_text())
        assert metadata["dataset"] == {"households": 12, "timesteps": 144, "granularity_minutes": 10}
        assert metadata["noise"]["lambda_kwh"] == metadata["noise"]["sensitivity_kwh"] / config.epsilon
        assert metadata["config"]["schemes"] == ["hourly", "drdp"]

    def test_emit_flags_produce_files(self, tmp_path):
        config = SimulationConfig(
            **SMALL_CONFIG, emit_load_reports=True, emit_bills=True
        )
        run_scenario(config, output_dir=tmp_path)
        assert (tmp_path / "load_report_DPNCT-Hourly_0.csv").exists()
        assert (tmp_path / "load_report_DRDP_1.csv").exists()
        assert (tmp_path / "bills.csv").exists()

    def test_no_files_when_disabled(self, tmp_path):
        config = SimulationConfig(**SMALL_CONFIG)
        result = run_scenario(config, output_dir=tmp_path, write_files=False)
        assert result.results_path is None
        assert not (tmp_path / "results.csv").exists()
        assert result.summaries["DRDP"].trials == 2

    def test_profile_overrides_change_correlation_window(self):
        base = SimulationConfig(**SMALL_CONFIG)
        ds = load_scenario_dataset(base)
        default_household = int(np.argsort(ds.readings.sum(axis=1), kind="stable")[ds.households // 2])
        pinned = SimulationConfig(
            **SMALL_CONFIG, profile_household=(default_household + 1) % ds.households
        )
        r_base = run_scenario(base, write_files=False)
        r_pinned = run_scenario(pinned, write_files=False)

        def hourly(res):
            return [r for r in res.rows if r[0] == "DPNCT-Hourly" and r[2] == "correlation"]

        assert hourly(r_base) != hourly(r_pinned)


class TestLoadScenarioDataset:
    def test_synthetic_by_default(self):
        config = SimulationConfig(**SMALL_CONFIG)
        ds = load_scenario_dataset(config)
        assert isinstance(ds, LoadDataset)
        assert ds.readings.shape == (12, 144)

    def test_csv_input(self, tmp_path):
        from dpnct.data import write_dataset_csv

        ds = small_dataset(households=6, days=1)
        path = tmp_path / "data.csv"
        write_dataset_csv(ds, path)
        config = SimulationConfig(households=6, days=1, groups=2, data_csv=str(path))
        loaded = load_scenario_dataset(config)
        np.testing.assert_array_equal(loaded.readings, ds.readings)

    def test_groups_checked_against_actual_dataset(self, tmp_path):
        from dpnct.data import write_dataset_csv

        ds = small_dataset(households=4, days=1)
        path = tmp_path / "data.csv"
        write_dataset_csv(ds, path)
        # config says 20 households but the CSV only has 4; groups=10 then
        # exceeds the real population and must be rejected at load time
        config = SimulationConfig(households=20, days=1, groups=10, data_csv=str(path))
        with pytest.raises(ConfigError):
            load_scenario_dataset(config)
