"""Aggregator-side load reconstruction and dynamic billing.

The aggregator never sees raw consumption: it receives masked readings from
meters and summed-noise reports from group masters, subtracts the reported
noise to recover the aggregate load, and at the end of each billing period
computes per-meter bills with a consumption cap, a surcharge price above
the cap, and a credit for surcharge wrongly caused by meter noise in the
previous period.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import IncompleteRound
from .grouping import GroupNoiseReport
from .meter import MaskedReading, SurchargeErrorReport

logger = logging.getLogger(__name__)

# One month of 10-minute readings: 6 per hour * 24 hours * 30 days.
BILLING_PERIOD_STEPS = 6 * 24 * 30


@dataclass(frozen=True)
class TariffConfig:
    """Cap-and-surcharge tariff for one billing period."""

    max_allowed_units: float
    unit_price: float
    surcharge_price: float

    def __post_init__(self):
        if self.max_allowed_units <= 0.0:
            raise ValueError(f"max_allowed_units must be > 0, got {self.max_allowed_units}")
        if self.unit_price <= 0.0:
            raise ValueError(f"unit_price must be > 0, got {self.unit_price}")
        if self.surcharge_price < self.unit_price:
            raise ValueError(
                f"surcharge_price must be >= unit_price, got {self.surcharge_price} < {self.unit_price}"
            )


@dataclass(frozen=True)
class LoadReport:
    """Reconstructed aggregate load at one timestep.

    ``complete`` is False when at least one group's noise report was
    missing; the reconstruction then still contains that group's noise.
    """

    timestep: int
    masked_sum: float
    reported_group_noise: float
    reconstructed_load: float
    complete: bool = True


@dataclass(frozen=True)
class BillStatement:
    """One meter's bill for one billing period.

    ``floored_units`` records how far a negative masked total was raised to
    reach zero; the engine feeds it into the meter's next-period error
    report so the money flow stays balanced.
    """

    meter_id: int
    billing_period: int
    consumed_units_masked: float
    base_units: float
    surcharge_units: float
    error_credit: float
    total: float
    floored_units: float = 0.0


def aggregated_load(
    masked: Iterable[MaskedReading],
    noise_reports: Iterable[GroupNoiseReport],
    expected_groups: int | None = None,
) -> LoadReport:
    """Reconstruct the total load at one timestep.

    Subtracts the masters' summed noise from the summed masked readings.
    A missing group report is flagged (warning, ``complete=False``) rather
    than fatal; the affected report keeps that group's noise uncorrected.
    """
    masked = list(masked)
    noise_reports = list(noise_reports)
    if not masked:
        raise ValueError("no masked readings supplied")
    timestep = masked[0].timestep
    for reading in masked:
        if reading.timestep != timestep:
            raise ValueError(f"mixed timesteps: {reading.timestep} != {timestep}")
    for report in noise_reports:
        if report.timestep != timestep:
            raise ValueError(f"noise report timestep {report.timestep} != {timestep}")
    complete = True
    if expected_groups is not None and len(noise_reports) < expected_groups:
        complete = False
        warnings.warn(
            IncompleteRound(
                f"timestep {timestep}: {len(noise_reports)} of {expected_groups} group reports present"
            )
        )
    masked_sum = math.fsum(r.masked_value for r in masked)
    noise_sum = math.fsum(r.aggregated_noise for r in noise_reports)
    return LoadReport(
        timestep=timestep,
        masked_sum=masked_sum,
        reported_group_noise=noise_sum,
        reconstructed_load=masked_sum - noise_sum,
        complete=complete,
    )


def bill_calculation(
    period_masked_totals: Mapping[int, float],
    tariff: TariffConfig,
    prior_errors: Mapping[int, SurchargeErrorReport] | Iterable[SurchargeErrorReport] = (),
    billing_period: int = 0,
) -> list[BillStatement]:
    """Bill every meter for one period from its masked consumption total.

    Consumption up to the cap is billed at the unit price, the excess at
    the surcharge price. Error units reported after the previous period are
    credited at the surcharge price, since that is the rate the meter was
    wrongly charged. Negative masked totals bill as zero units; the floored
    amount is recorded on the statement.
    """
    if not isinstance(prior_errors, Mapping):
        prior_errors = {report.meter_id: report for report in prior_errors}
    statements = []
    for meter_id in sorted(period_masked_totals):
        consumed = float(period_masked_totals[meter_id])
        floored = 0.0
        billable = consumed
        if billable < 0.0:
            floored = -billable
            billable = 0.0
            logger.warning(
                "meter %d period %d: negative masked total %.6f floored to 0",
                meter_id,
                billing_period,
                consumed,
            )
        surcharge_units = max(0.0, consumed - tariff.max_allowed_units)
        base_units = min(billable, tariff.max_allowed_units)
        report = prior_errors.get(meter_id)
        error_credit = report.error_units * tariff.surcharge_price if report is not None else 0.0
        total = base_units * tariff.unit_price + surcharge_units * tariff.surcharge_price - error_credit
        statements.append(
            BillStatement(
                meter_id=meter_id,
                billing_period=billing_period,
                consumed_units_masked=consumed,
                base_units=base_units,
                surcharge_units=surcharge_units,
                error_credit=error_credit,
                total=total,
                floored_units=floored,
            )
        )
    return statements
