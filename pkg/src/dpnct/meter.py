"""Per-household smart-meter state machine.

Each meter masks its reading with a fresh gamma-difference share, remembers
the noise it injected during the current cancellation period, and subtracts
that noise again one period later, so the cumulative billing error is
bounded by the final period's noise. At billing time the meter reports how
much of a surcharge was caused by its own uncancelled noise.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfOrderTimestep
from .noise import NoiseScale, sample_gamma_share

logger = logging.getLogger(__name__)

# Timesteps per cancellation period, keyed by scheme variant, at the
# default 10-minute reading granularity.
PERIOD_HOURS = {"hourly": 1, "daily": 24, "weekly": 168}

# The surcharge error a meter may reclaim is based on the *net* noise left
# in its billing-period series (the uncancelled final-period noise): that
# is the only quantity that can wrongly push a masked total over the cap.
ERROR_UNITS_BASIS = "billing-period-net-noise"


@dataclass(frozen=True)
class MeterReading:
    """One household's true consumption at one timestep, in kWh."""

    meter_id: int
    timestep: int
    consumption: float

    def __post_init__(self):
        if self.consumption < 0.0:
            raise ValueError(f"consumption must be >= 0, got {self.consumption}")
        if self.timestep < 0:
            raise ValueError(f"timestep must be >= 0, got {self.timestep}")


@dataclass(frozen=True)
class CancellationScheme:
    """Noise-cancellation window: hourly, daily, or weekly."""

    variant: str
    period_length: int

    def __post_init__(self):
        if self.variant not in PERIOD_HOURS:
            raise ValueError(f"unknown scheme variant {self.variant!r}")
        if self.period_length < 1:
            raise ValueError("period_length must be >= 1")

    @classmethod
    def from_name(cls, name: str, granularity_minutes: int = 10) -> "CancellationScheme":
        variant = name.lower()
        if variant not in PERIOD_HOURS:
            raise ValueError(f"unknown scheme variant {name!r}")
        if granularity_minutes < 1 or 60 % granularity_minutes != 0:
            raise ValueError(f"granularity must divide 60 minutes, got {granularity_minutes}")
        steps_per_hour = 60 // granularity_minutes
        return cls(variant, PERIOD_HOURS[variant] * steps_per_hour)

    @property
    def label(self) -> str:
        return f"DPNCT-{self.variant.capitalize()}"


@dataclass
class NoiseLedger:
    """Per-meter record of injected noise and noise pending cancellation.

    ``current_period`` holds the noise injected so far in the running
    cancellation period; ``previous_period`` holds last period's noise in
    injection order, consumed FIFO so that the j-th reading of a period
    cancels the j-th injection of the period before. ``discarded`` logs any
    noise that was never cancelled because a rotation arrived before the
    previous queue drained.
    """

    period_length: int
    current_period: deque = field(default_factory=deque)
    previous_period: deque = field(default_factory=deque)
    next_timestep: int = 0
    discarded: list = field(default_factory=list)


@dataclass(frozen=True)
class MaskedReading:
    """What the meter puts on the wire: consumption plus net noise."""

    meter_id: int
    timestep: int
    masked_value: float
    net_noise: float


@dataclass(frozen=True)
class SurchargeErrorReport:
    """Noise-caused surcharge units a meter reclaims for the next bill."""

    meter_id: int
    billing_period: int
    error_units: float

    def __post_init__(self):
        if self.error_units < 0.0:
            raise ValueError(f"error_units must be >= 0, got {self.error_units}")


def _apply_noise(reading: MeterReading, ledger: NoiseLedger, injected: float):
    """Core masking step shared by the rng path and scripted-noise tests."""
    if reading.timestep != ledger.next_timestep:
        raise OutOfOrderTimestep(
            f"meter {reading.meter_id}: expected timestep {ledger.next_timestep}, "
            f"got {reading.timestep}"
        )
    if len(ledger.current_period) >= ledger.period_length:
        raise OutOfOrderTimestep(
            f"meter {reading.meter_id}: period not rotated after "
            f"{ledger.period_length} readings"
        )
    cancelled = ledger.previous_period.popleft() if ledger.previous_period else 0.0
    ledger.current_period.append(injected)
    ledger.next_timestep = reading.timestep + 1
    net = injected - cancelled
    masked = MaskedReading(
        meter_id=reading.meter_id,
        timestep=reading.timestep,
        masked_value=reading.consumption + net,
        net_noise=net,
    )
    return masked, ledger, cancelled


def mask_reading(
    reading: MeterReading,
    ledger: NoiseLedger,
    scale: NoiseScale,
    population: int,
    rng: np.random.Generator,
) -> tuple[MaskedReading, NoiseLedger]:
    """Mask one reading: draw a fresh share, cancel last period's noise.

    Pops the oldest pending noise from the previous period (0 if none),
    pushes the fresh draw onto the current period, and returns the masked
    value consumption + injected - cancelled together with the updated
    ledger.

    Raises:
        OutOfOrderTimestep: the reading skips or repeats a timestep.
    """
    injected = sample_gamma_share(scale, population, rng)
    masked, ledger, _ = _apply_noise(reading, ledger, injected)
    return masked, ledger


def rotate_period(ledger: NoiseLedger) -> NoiseLedger:
    """Start a new cancellation period.

    The current queue becomes the previous one; anything still pending in
    the old previous queue can no longer be cancelled, so it is moved to
    the residual log. Mutates and returns the ledger.
    """
    if ledger.previous_period:
        leftovers = list(ledger.previous_period)
        ledger.discarded.extend(leftovers)
        logger.warning(
            "rotation discarded %d uncancelled noise values (sum %.6f kWh)",
            len(leftovers),
            math.fsum(leftovers),
        )
    ledger.previous_period = ledger.current_period
    ledger.current_period = deque()
    return ledger


def compute_error_report(
    surcharge_units: float,
    net_noise_history,
    *,
    meter_id: int,
    billing_period: int,
) -> SurchargeErrorReport:
    """Error units to reclaim after the aggregator notified a surcharge.

    The reclaimable amount is the part of the surcharge explained by the
    meter's own residual noise: min(surcharge, residual) when the residual
    pushed the total up, the full noise when the surcharge exceeds it, and
    nothing when there was no surcharge or the residual was negative
    (negative residual lowered the total, so it cannot have caused the
    surcharge).
    """
    if surcharge_units < 0.0:
        raise ValueError(f"surcharge_units must be >= 0, got {surcharge_units}")
    residual = math.fsum(net_noise_history)
    if surcharge_units > 0.0 and residual > 0.0:
        error_units = min(surcharge_units, residual)
    else:
        error_units = 0.0
    return SurchargeErrorReport(meter_id=meter_id, billing_period=billing_period, error_units=error_units)


class SmartMeter:
    """Stateful reference walker over one meter's reading stream.

    Rotates its ledger automatically at cancellation-period boundaries and
    keeps the full injected / cancelled / net history, which the telescoping
    oracle and billing error reports replay. The vectorised simulation
    kernel reproduces exactly this behaviour; tests hold the two paths
    against each other.
    """

    def __init__(self, meter_id: int, scheme: CancellationScheme, noise_source):
        self.meter_id = meter_id
        self.scheme = scheme
        self.ledger = NoiseLedger(period_length=scheme.period_length)
        self._noise_source = noise_source
        self.injected_history: list[float] = []
        self.cancelled_history: list[float] = []
        self.net_history: list[float] = []

    @classmethod
    def with_rng(
        cls,
        meter_id: int,
        scheme: CancellationScheme,
        scale: NoiseScale,
        population: int,
        rng: np.random.Generator,
    ) -> "SmartMeter":
        return cls(meter_id, scheme, lambda: sample_gamma_share(scale, population, rng))

    def observe(self, consumption: float) -> MaskedReading:
        """Mask the next reading, rotating the ledger at period boundaries."""
        t = self.ledger.next_timestep
        if t > 0 and t % self.scheme.period_length == 0 and self.ledger.current_period:
            rotate_period(self.ledger)
        reading = MeterReading(meter_id=self.meter_id, timestep=t, consumption=consumption)
        injected = float(self._noise_source())
        masked, _, cancelled = _apply_noise(reading, self.ledger, injected)
        self.injected_history.append(injected)
        self.cancelled_history.append(cancelled)
        self.net_history.append(masked.net_noise)
        return masked

    def error_report(self, surcharge_units: float, billing_period: int, period_slice=None) -> SurchargeErrorReport:
        """Build the surcharge error report from the recorded net history."""
        history = self.net_history if period_slice is None else self.net_history[period_slice]
        return compute_error_report(
            surcharge_units,
            history,
            meter_id=self.meter_id,
            billing_period=billing_period,
        )
