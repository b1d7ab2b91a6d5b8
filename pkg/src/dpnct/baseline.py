"""Trusted-aggregator baseline scheme.

In this baseline the meters send their true readings to the aggregator
unprotected; only the aggregator perturbs data, adding one whole Laplace
draw per data point before forwarding the series toward the grid. Bills
are computed from the true data, so billing is exact by construction, but
the aggregator sees every household's raw consumption.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregator import BILLING_PERIOD_STEPS, BillStatement, TariffConfig, bill_calculation
from .noise import NoiseScale, sample_laplace

SCHEME_LABEL = "DRDP"


@dataclass(frozen=True)
class DrdpRun:
    """Outcome of one baseline trial.

    ``masked_series`` is what the grid receives (true plus Laplace);
    ``aggregator_input`` is what the aggregator receives from the meters,
    which is the true data itself.
    """

    true_series: np.ndarray
    masked_series: np.ndarray
    bills: list

    @property
    def aggregator_input(self) -> np.ndarray:
        return self.true_series


def bills_from_true_data(
    true_readings: np.ndarray,
    tariff: TariffConfig,
    billing_period_steps: int = BILLING_PERIOD_STEPS,
) -> list[BillStatement]:
    """Noise-free billing: per-period per-meter totals of the true data."""
    num_meters, timesteps = true_readings.shape
    num_periods = -(-timesteps // billing_period_steps)
    statements: list[BillStatement] = []
    for period in range(num_periods):
        window = slice(period * billing_period_steps, min((period + 1) * billing_period_steps, timesteps))
        totals = {meter: float(true_readings[meter, window].sum()) for meter in range(num_meters)}
        statements.extend(bill_calculation(totals, tariff, prior_errors={}, billing_period=period))
    return statements


def run_drdp(
    true_readings: np.ndarray,
    scale: NoiseScale,
    tariff: TariffConfig,
    rng: np.random.Generator,
    billing_period_steps: int = BILLING_PERIOD_STEPS,
) -> DrdpRun:
    """Run the baseline over a full horizon.

    The grid-facing series gets independent Laplace noise per point; the
    bills come from the true readings with no error credits (there is no
    noise in the billing path to correct for).
    """
    true_readings = np.ascontiguousarray(true_readings, dtype=np.float64)
    noise = sample_laplace(scale, rng, size=true_readings.shape)
    masked = true_readings + noise
    bills = bills_from_true_data(true_readings, tariff, billing_period_steps)
    return DrdpRun(true_series=true_readings, masked_series=masked, bills=bills)
