"""End-to-end trial and scenario orchestration.

A trial simulates one (scheme, seed) pair over the whole horizon: meters
mask every reading, group masters sum the per-round noise, the aggregator
reconstructs the load per timestep and bills per period, and the metrics
are computed against the true data. A scenario runs the configured grid of
schemes and seeds over one shared dataset and writes the result files.

Meters advance in lockstep, so the per-meter state machine unrolls into
dense matrix kernels; the compiled and pure backends produce identical
floats (see `kernel`).
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, kernel
from .aggregator import BILLING_PERIOD_STEPS, BillStatement, TariffConfig, bill_calculation
from .baseline import SCHEME_LABEL as DRDP_LABEL
from .baseline import DrdpRun, bills_from_true_data, run_drdp
from .config import SimulationConfig
from .data import (
    LoadDataset,
    generate_synthetic,
    read_dataset_csv,
    write_bills_csv,
    write_load_report_csv,
    write_results_csv,
)
from .errors import ConfigError
from .grouping import assignments_for_rounds, group_index_matrix
from .metrics import MAE_DEFINITION, TrialResult, average_trials, mae, pearson_correlation
from .meter import CancellationScheme, SurchargeErrorReport, compute_error_report
from .noise import (
    PrivacyParams,
    composed_laplace_scale,
    compute_pointwise_sensitivity,
    laplace_scale,
    sample_gamma_share,
)

# Stable stream tags: every random stream is keyed by
# (seed, scheme code, role, ...) so trials never share or reuse a stream.
SCHEME_CODES = {"hourly": 1, "daily": 2, "weekly": 3, "drdp": 4}
_ROLE_METER_NOISE = 1
_ROLE_GROUPS = 2
_ROLE_AGGREGATOR_NOISE = 3

METRIC_ORDER = ("mae_total_consumption", "mae_bill", "correlation")


@dataclass
class TrialOutput:
    """Everything one trial produced, metrics plus audit trails."""

    result: TrialResult
    bills: list[BillStatement]
    error_reports: dict[int, SurchargeErrorReport]
    masked_sum: np.ndarray
    group_noise: np.ndarray
    reconstructed: np.ndarray
    true_total: np.ndarray
    extra_metrics: dict[str, float] = field(default_factory=dict)
    duration_seconds: float = 0.0


@dataclass
class ScenarioResult:
    """Scenario outcome: rows written to the results CSV plus summaries."""

    rows: list[tuple[str, int, str, float]]
    outputs: list[TrialOutput]
    results_path: Path | None
    summaries: dict


def _profile_indices(dataset: LoadDataset, profile_household: int | None, profile_day: int | None):
    """Household and day the privacy correlation is evaluated on.

    Defaults: the household with the median total consumption, on the
    middle day of the horizon.
    """
    if profile_household is None:
        totals = dataset.readings.sum(axis=1)
        profile_household = int(np.argsort(totals, kind="stable")[dataset.households // 2])
    if profile_day is None:
        profile_day = dataset.days // 2
    start = profile_day * dataset.steps_per_day
    return profile_household, slice(start, start + dataset.steps_per_day)


def _noise_scale(dataset: LoadDataset, epsilon: float, budget_mode: str, billing_period_steps: int):
    sensitivity = compute_pointwise_sensitivity(dataset.readings)
    params = PrivacyParams(epsilon=epsilon, sensitivity=sensitivity, population=dataset.households)
    if budget_mode == "composed":
        return params, composed_laplace_scale(params, min(dataset.timesteps, billing_period_steps))
    return params, laplace_scale(params)


def _meter_injections(seed: int, scheme_code: int, scale, population: int, timesteps: int) -> np.ndarray:
    """Fresh noise per meter and timestep, one rng stream per meter ID."""
    injected = np.empty((population, timesteps), dtype=np.float64)
    for meter in range(population):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([seed, scheme_code, _ROLE_METER_NOISE, meter]))
        )
        injected[meter] = sample_gamma_share(scale, population, rng, size=timesteps)
    return injected


def _run_billing(
    masked: np.ndarray,
    net: np.ndarray,
    tariff: TariffConfig,
    billing_period_steps: int,
) -> tuple[list[BillStatement], dict[int, SurchargeErrorReport]]:
    """Walk billing periods, carrying error credits one period forward.

    After each period, every surcharged meter reports the part of its
    surcharge explained by its own residual noise; any floored negative
    total is added to the same report. Reports are credited next period.
    """
    num_meters, timesteps = masked.shape
    num_periods = -(-timesteps // billing_period_steps)
    prior_reports: dict[int, SurchargeErrorReport] = {}
    statements: list[BillStatement] = []
    for period in range(num_periods):
        window = slice(period * billing_period_steps, min((period + 1) * billing_period_steps, timesteps))
        totals = {meter: float(masked[meter, window].sum()) for meter in range(num_meters)}
        period_bills = bill_calculation(totals, tariff, prior_errors=prior_reports, billing_period=period)
        statements.extend(period_bills)
        prior_reports = {}
        for statement in period_bills:
            units = 0.0
            if statement.surcharge_units > 0.0:
                report = compute_error_report(
                    statement.surcharge_units,
                    net[statement.meter_id, window],
                    meter_id=statement.meter_id,
                    billing_period=period,
                )
                units = report.error_units
            units += statement.floored_units
            if units > 0.0:
                prior_reports[statement.meter_id] = SurchargeErrorReport(
                    meter_id=statement.meter_id, billing_period=period, error_units=units
                )
    return statements, prior_reports


def _bill_totals_by_meter(bills: list[BillStatement], num_meters: int) -> np.ndarray:
    totals = np.zeros(num_meters, dtype=np.float64)
    for statement in bills:
        totals[statement.meter_id] += statement.total
    return totals


def run_dpnct_trial(
    dataset: LoadDataset,
    scheme_name: str,
    *,
    epsilon: float,
    num_groups: int,
    tariff: TariffConfig,
    seed: int,
    budget_mode: str = "per-reading",
    noise_mode: str = "net",
    billing_period_steps: int = BILLING_PERIOD_STEPS,
    profile_household: int | None = None,
    profile_day: int | None = None,
    injected_override: np.ndarray | None = None,
) -> TrialOutput:
    """Simulate one noise-cancellation trial over the full horizon.

    ``injected_override`` replaces the drawn noise matrix with a scripted
    one (meters x timesteps); billing and cancellation mechanics run
    unchanged on it, which the refund tests use to stage exact scenarios.
    """
    started = time.perf_counter()
    scheme = CancellationScheme.from_name(scheme_name, dataset.granularity_minutes)
    scheme_code = SCHEME_CODES[scheme.variant]
    readings = dataset.readings
    num_meters, timesteps = readings.shape

    _, scale = _noise_scale(dataset, epsilon, budget_mode, billing_period_steps)
    if injected_override is not None:
        injected = np.ascontiguousarray(injected_override, dtype=np.float64)
        if injected.shape != readings.shape:
            raise ValueError(f"injected_override shape {injected.shape} != {readings.shape}")
    else:
        injected = _meter_injections(seed, scheme_code, scale, num_meters, timesteps)

    num_rounds = -(-timesteps // scheme.period_length)
    assignments = assignments_for_rounds(
        num_meters,
        num_groups,
        num_rounds,
        np.random.SeedSequence([seed, scheme_code, _ROLE_GROUPS]),
    )
    group_index = group_index_matrix(assignments, num_meters)

    net, masked, group_sums = kernel.noise_pipeline(
        readings,
        injected,
        group_index,
        scheme.period_length,
        num_groups,
        submit_net=(noise_mode == "net"),
    )

    masked_sum = masked.sum(axis=0)
    group_noise = group_sums.sum(axis=0)
    reconstructed = masked_sum - group_noise
    true_total = readings.sum(axis=0)

    bills, error_reports = _run_billing(masked, net, tariff, billing_period_steps)
    oracle_bills = bills_from_true_data(readings, tariff, billing_period_steps)

    household, window = _profile_indices(dataset, profile_household, profile_day)
    result = TrialResult(
        scheme=scheme.label,
        seed=seed,
        mae_total_consumption=mae(readings.sum(axis=1), masked.sum(axis=1)),
        mae_bill=mae(
            _bill_totals_by_meter(oracle_bills, num_meters),
            _bill_totals_by_meter(bills, num_meters),
        ),
        correlation=pearson_correlation(readings[household, window], masked[household, window]),
    )
    return TrialOutput(
        result=result,
        bills=bills,
        error_reports=error_reports,
        masked_sum=masked_sum,
        group_noise=group_noise,
        reconstructed=reconstructed,
        true_total=true_total,
        duration_seconds=time.perf_counter() - started,
    )


def run_drdp_trial(
    dataset: LoadDataset,
    *,
    epsilon: float,
    tariff: TariffConfig,
    seed: int,
    budget_mode: str = "per-reading",
    billing_period_steps: int = BILLING_PERIOD_STEPS,
    profile_household: int | None = None,
    profile_day: int | None = None,
) -> TrialOutput:
    """Simulate one trusted-aggregator baseline trial.

    The aggregator input is the true data, so the privacy correlation is
    1.0 by construction; the grid-side correlation (after the aggregator's
    own Laplace noise) is emitted as the extra metric `correlation_grid`.
    """
    started = time.perf_counter()
    readings = dataset.readings
    num_meters = dataset.households
    _, scale = _noise_scale(dataset, epsilon, budget_mode, billing_period_steps)
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([seed, SCHEME_CODES["drdp"], _ROLE_AGGREGATOR_NOISE]))
    )
    run: DrdpRun = run_drdp(readings, scale, tariff, rng, billing_period_steps)
    oracle_bills = bills_from_true_data(readings, tariff, billing_period_steps)

    household, window = _profile_indices(dataset, profile_household, profile_day)
    result = TrialResult(
        scheme=DRDP_LABEL,
        seed=seed,
        mae_total_consumption=mae(readings.sum(axis=1), run.masked_series.sum(axis=1)),
        mae_bill=mae(
            _bill_totals_by_meter(oracle_bills, num_meters),
            _bill_totals_by_meter(run.bills, num_meters),
        ),
        correlation=pearson_correlation(
            readings[household, window], run.aggregator_input[household, window]
        ),
    )
    grid_correlation = pearson_correlation(
        readings[household, window], run.masked_series[household, window]
    )
    # The grid receives the noised series, so the true aggregate is only
    # known to the aggregator; report sums describe what the grid sees.
    masked_sum = run.masked_series.sum(axis=0)
    true_total = readings.sum(axis=0)
    return TrialOutput(
        result=result,
        bills=run.bills,
        error_reports={},
        masked_sum=masked_sum,
        group_noise=np.zeros_like(masked_sum),
        reconstructed=masked_sum,
        true_total=true_total,
        extra_metrics={"correlation_grid": grid_correlation},
        duration_seconds=time.perf_counter() - started,
    )


def load_scenario_dataset(config: SimulationConfig) -> LoadDataset:
    """The scenario's dataset: read from CSV or generate synthetically."""
    if config.data_csv is not None:
        dataset = read_dataset_csv(config.data_csv, config.granularity_minutes)
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.data_seed)))
        dataset = generate_synthetic(config.households, config.days, rng, config.granularity_minutes)
    if config.groups > dataset.households:
        raise ConfigError(
            f"groups={config.groups} exceeds the dataset's {dataset.households} households"
        )
    if config.profile_household is not None and config.profile_household >= dataset.households:
        raise ConfigError(f"profile_household out of range for {dataset.households} households")
    if config.profile_day is not None and config.profile_day >= dataset.days:
        raise ConfigError(f"profile_day out of range for {dataset.days} days")
    return dataset


def run_scenario(config: SimulationConfig, output_dir=None, write_files: bool = True) -> ScenarioResult:
    """Run the configured scheme x seed grid over one shared dataset.

    Writes results.csv (one row per trial metric), results_metadata.json,
    and optionally per-trial load reports and a bills CSV, all with fully
    deterministic content for a given config.
    """
    dataset = load_scenario_dataset(config)
    tariff = config.tariff
    rows: list[tuple[str, int, str, float]] = []
    outputs: list[TrialOutput] = []
    load_report_files: list[tuple[str, int, TrialOutput]] = []

    for scheme_name in config.schemes:
        for seed in config.seeds:
            if scheme_name == "drdp":
                output = run_drdp_trial(
                    dataset,
                    epsilon=config.epsilon,
                    tariff=tariff,
                    seed=seed,
                    budget_mode=config.budget_mode,
                    profile_household=config.profile_household,
                    profile_day=config.profile_day,
                )
            else:
                output = run_dpnct_trial(
                    dataset,
                    scheme_name,
                    epsilon=config.epsilon,
                    num_groups=config.groups,
                    tariff=tariff,
                    seed=seed,
                    budget_mode=config.budget_mode,
                    noise_mode=config.noise_mode,
                    profile_household=config.profile_household,
                    profile_day=config.profile_day,
                )
            outputs.append(output)
            label = output.result.scheme
            for metric in METRIC_ORDER:
                rows.append((label, seed, metric, getattr(output.result, metric)))
            for metric in sorted(output.extra_metrics):
                rows.append((label, seed, metric, output.extra_metrics[metric]))
            load_report_files.append((label, seed, output))

    summaries = average_trials([output.result for output in outputs])
    results_path = None
    if write_files:
        out = Path(output_dir if output_dir is not None else config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        results_path = out / "results.csv"
        write_results_csv(rows, results_path)
        _write_metadata(config, dataset, out / "results_metadata.json")
        if config.emit_load_reports:
            for label, seed, output in load_report_files:
                report_rows = zip(
                    range(dataset.timesteps),
                    output.masked_sum,
                    output.group_noise,
                    output.reconstructed,
                    output.true_total,
                )
                write_load_report_csv(report_rows, out / f"load_report_{label}_{seed}.csv")
        if config.emit_bills:
            bill_rows = []
            for label, seed, output in load_report_files:
                for statement in output.bills:
                    bill_rows.append(
                        (
                            label,
                            seed,
                            statement.meter_id,
                            statement.billing_period,
                            statement.consumed_units_masked,
                            statement.base_units,
                            statement.surcharge_units,
                            statement.error_credit,
                            statement.total,
                        )
                    )
            write_bills_csv(bill_rows, out / "bills.csv")
    return ScenarioResult(rows=rows, outputs=outputs, results_path=results_path, summaries=summaries)


def _write_metadata(config: SimulationConfig, dataset: LoadDataset, path: Path) -> None:
    """Deterministic run metadata: config echo plus metric definitions."""
    params, scale = _noise_scale(dataset, config.epsilon, config.budget_mode, BILLING_PERIOD_STEPS)
    metadata = {
        "package_version": __version__,
        "kernel_backend": kernel.active_backend(),
        "config": dataclasses.asdict(config),
        "dataset": {
            "households": dataset.households,
            "timesteps": dataset.timesteps,
            "granularity_minutes": dataset.granularity_minutes,
        },
        "noise": {
            "sensitivity_kwh": params.sensitivity,
            "lambda_kwh": scale.value,
        },
        "metric_notes": {
            "mae": MAE_DEFINITION
            + "; the conventional formula sums the relative errors, this implementation divides by the household count",
            "correlation": "Pearson r of one household's true vs observed profile over one day",
        },
    }
    with open(path, "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
