"""Differentially private smart-meter simulation with noise cancellation.

Meters mask every reading with a gamma-difference noise share and cancel
each share one period later, group masters forward summed noise so the
aggregator can reconstruct the exact total load, and billing corrects
noise-caused surcharges with next-period credits. A trusted-aggregator
baseline, metrics, a synthetic data generator, and a CLI round out the
simulation framework.
"""

__version__ = "0.1.0"

from .aggregator import (
    BILLING_PERIOD_STEPS,
    BillStatement,
    LoadReport,
    TariffConfig,
    aggregated_load,
    bill_calculation,
)
from .baseline import DrdpRun, bills_from_true_data, run_drdp
from .config import SimulationConfig, load_config
from .data import LoadDataset, generate_synthetic, read_dataset_csv, write_dataset_csv
from .errors import (
    ConfigError,
    DegenerateSeries,
    DpnctError,
    EmptyInput,
    IncompleteRound,
    MalformedRow,
    MissingSubmission,
    NonMonotoneTimesteps,
    OutOfOrderTimestep,
    TooManyGroups,
    ZeroDenominator,
    ZeroSensitivity,
)
from .grouping import GroupAssignment, GroupNoiseReport, accumulate_group_noise, form_groups
from .kernel import active_backend, available_backends
from .meter import (
    CancellationScheme,
    MaskedReading,
    MeterReading,
    NoiseLedger,
    SmartMeter,
    SurchargeErrorReport,
    compute_error_report,
    mask_reading,
    rotate_period,
)
from .metrics import TrialResult, average_trials, mae, pearson_correlation
from .noise import (
    NoiseScale,
    PrivacyParams,
    composed_laplace_scale,
    compute_pointwise_sensitivity,
    laplace_scale,
    sample_gamma_share,
    sample_laplace,
)
from .simulation import (
    ScenarioResult,
    TrialOutput,
    load_scenario_dataset,
    run_dpnct_trial,
    run_drdp_trial,
    run_scenario,
)

__all__ = [
    "BILLING_PERIOD_STEPS",
    "BillStatement",
    "CancellationScheme",
    "ConfigError",
    "DegenerateSeries",
    "DpnctError",
    "DrdpRun",
    "EmptyInput",
    "GroupAssignment",
    "GroupNoiseReport",
    "IncompleteRound",
    "LoadDataset",
    "LoadReport",
    "MalformedRow",
    "MaskedReading",
    "MeterReading",
    "MissingSubmission",
    "NoiseLedger",
    "NoiseScale",
    "NonMonotoneTimesteps",
    "OutOfOrderTimestep",
    "PrivacyParams",
    "ScenarioResult",
    "SimulationConfig",
    "SmartMeter",
    "SurchargeErrorReport",
    "TariffConfig",
    "TooManyGroups",
    "TrialOutput",
    "TrialResult",
    "ZeroDenominator",
    "ZeroSensitivity",
    "accumulate_group_noise",
    "active_backend",
    "aggregated_load",
    "available_backends",
    "average_trials",
    "bill_calculation",
    "bills_from_true_data",
    "composed_laplace_scale",
    "compute_error_report",
    "compute_pointwise_sensitivity",
    "form_groups",
    "generate_synthetic",
    "laplace_scale",
    "load_config",
    "load_scenario_dataset",
    "mae",
    "mask_reading",
    "pearson_correlation",
    "read_dataset_csv",
    "rotate_period",
    "run_dpnct_trial",
    "run_drdp_trial",
    "run_drdp",
    "run_scenario",
    "sample_gamma_share",
    "sample_laplace",
    "write_dataset_csv",
    "__version__",
]
