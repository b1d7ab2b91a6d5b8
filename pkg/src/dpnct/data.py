"""Synthetic household load generation and CSV ingestion/emission.

The generator produces a residential-looking corpus: a diurnal template
with a small overnight base, a morning bump, and a dominant evening peak,
scaled per household, with multiplicative per-reading speckle. A few heavy
households push the largest readings up to a hard ceiling, which pins the
worst-case reading (and with it the noise scale) across seeds.

All values are kWh per reading, quantised to 6 decimal places so that
writing a dataset to CSV and reading it back reproduces the exact same
doubles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import MalformedRow, NonMonotoneTimesteps

DATASET_HEADER = ("timestep", "household_id", "kwh")
RESULTS_HEADER = ("scheme", "seed", "metric", "value")
LOAD_REPORT_HEADER = ("timestep", "masked_sum", "group_noise", "reconstructed", "true_total")

# Hard ceiling on a single reading, kWh. Heavy households hit it, so every
# generated corpus has the same worst-case reading, which pins the noise
# scale at ceiling/epsilon.
MAX_READING_KWH = 10.0
MIN_READING_KWH = 1e-6

# Diurnal template, kWh per 10-minute reading for a scale-1.0 household.
_BASE_LOAD = 0.05
_MORNING_PEAK = (0.08, 7.5, 1.2)   # height, centre hour, width hours
_EVENING_PEAK = (0.12, 19.5, 2.0)

# Per-household log-normal spread and the heavy-household multiplier band.
_SCALE_SIGMA = 0.30
_HEAVY_MULTIPLIER = (40.0, 55.0)
_HEAVY_FRACTION = 0.02

# Per-reading multiplicative speckle: gamma with mean 1, std 1/sqrt(shape).
_SPECKLE_SHAPE = 16.0


def _quantize(values: np.ndarray) -> np.ndarray:
    """Snap to the 6-decimal grid the CSV format can represent exactly."""
    return np.rint(values * 1e6) / 1e6


@dataclass(frozen=True)
class LoadDataset:
    """Household consumption matrix, one row per household, kWh."""

    readings: np.ndarray
    granularity_minutes: int = 10

    def __post_init__(self):
        readings = np.asarray(self.readings, dtype=float)
        if readings.ndim != 2 or readings.size == 0:
            raise ValueError("readings must be a nonempty households x timesteps matrix")
        if np.any(readings < 0.0):
            raise ValueError("readings must be >= 0")
        if 60 % self.granularity_minutes != 0:
            raise ValueError(f"granularity must divide 60 minutes, got {self.granularity_minutes}")
        object.__setattr__(self, "readings", readings)

    @property
    def households(self) -> int:
        return self.readings.shape[0]

    @property
    def timesteps(self) -> int:
        return self.readings.shape[1]

    @property
    def steps_per_day(self) -> int:
        return (60 // self.granularity_minutes) * 24

    @property
    def days(self) -> int:
        return self.timesteps // self.steps_per_day


def diurnal_template(steps_per_day: int) -> np.ndarray:
    """Scale-1.0 household's expected kWh per reading over one day."""
    hours = (np.arange(steps_per_day) + 0.5) * (24.0 / steps_per_day)
    profile = np.full(steps_per_day, _BASE_LOAD)
    for height, centre, width in (_MORNING_PEAK, _EVENING_PEAK):
        profile += height * np.exp(-0.5 * ((hours - centre) / width) ** 2)
    return profile


def generate_synthetic(
    households: int,
    days: int,
    rng: np.random.Generator,
    granularity_minutes: int = 10,
) -> LoadDataset:
    """Generate a deterministic, strictly positive synthetic corpus."""
    if households < 1:
        raise ValueError(f"households must be >= 1, got {households}")
    if days < 1:
        raise ValueError(f"days must be >= 1, got {days}")
    steps_per_day = (60 // granularity_minutes) * 24
    timesteps = steps_per_day * days

    scales = rng.lognormal(mean=0.0, sigma=_SCALE_SIGMA, size=households)
    num_heavy = max(1, round(households * _HEAVY_FRACTION))
    heavy_ids = rng.choice(households, size=num_heavy, replace=False)
    scales[heavy_ids] *= rng.uniform(*_HEAVY_MULTIPLIER, size=num_heavy)

    template = np.tile(diurnal_template(steps_per_day), days)
    speckle = rng.gamma(shape=_SPECKLE_SHAPE, scale=1.0 / _SPECKLE_SHAPE, size=(households, timesteps))
    readings = scales[:, None] * template[None, :] * speckle
    readings = np.clip(readings, MIN_READING_KWH, MAX_READING_KWH)
    return LoadDataset(readings=_quantize(readings), granularity_minutes=granularity_minutes)


def write_dataset_csv(dataset: LoadDataset, path) -> None:
    """Emit `timestep,household_id,kwh` rows, timestep-major."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for t in range(dataset.timesteps):
            for h in range(dataset.households):
                writer.writerow((t, h, f"{dataset.readings[h, t]:.6f}"))


def read_dataset_csv(path, granularity_minutes: int = 10) -> LoadDataset:
    """Parse a dataset CSV back into a matrix, strictly validated.

    Every household must supply consecutive timesteps starting at 0 and
    all households must cover the same range.

    Raises:
        MalformedRow: wrong header, wrong field count, non-integer keys,
            or a kwh value that is negative or not finite.
        NonMonotoneTimesteps: a household skips or repeats a timestep.
    """
    series: dict[int, list[float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != DATASET_HEADER:
            raise MalformedRow(1, f"expected header {','.join(DATASET_HEADER)}")
        for line_number, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise MalformedRow(line_number, f"expected 3 fields, got {len(row)}")
            try:
                timestep = int(row[0])
                household = int(row[1])
                kwh = float(row[2])
            except ValueError as exc:
                raise MalformedRow(line_number, str(exc)) from None
            if not math.isfinite(kwh) or kwh < 0.0:
                raise MalformedRow(line_number, f"kwh must be finite and >= 0, got {row[2]}")
            if timestep < 0 or household < 0:
                raise MalformedRow(line_number, "negative timestep or household_id")
            values = series.setdefault(household, [])
            if timestep != len(values):
                raise NonMonotoneTimesteps(
                    f"household {household}: expected timestep {len(values)}, got {timestep} "
                    f"(line {line_number})"
                )
            values.append(kwh)
    if not series:
        raise MalformedRow(2, "no data rows")
    households = sorted(series)
    if households != list(range(len(households))):
        raise MalformedRow(2, f"household ids must be 0..{len(households) - 1}")
    lengths = {len(series[h]) for h in households}
    if len(lengths) != 1:
        raise NonMonotoneTimesteps(f"households cover unequal ranges: {sorted(lengths)}")
    readings = np.array([series[h] for h in households], dtype=float)
    return LoadDataset(readings=readings, granularity_minutes=granularity_minutes)


def write_results_csv(rows, path) -> None:
    """Emit `scheme,seed,metric,value` rows; values keep full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for scheme, seed, metric, value in rows:
            writer.writerow((scheme, seed, metric, repr(float(value))))


def read_results_csv(path) -> list[tuple[str, int, str, float]]:
    """Parse a results CSV produced by `write_results_csv`."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULTS_HEADER:
            raise MalformedRow(1, f"expected header {','.join(RESULTS_HEADER)}")
        for line_number, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise MalformedRow(line_number, f"expected 4 fields, got {len(row)}")
            try:
                rows.append((row[0], int(row[1]), row[2], float(row[3])))
            except ValueError as exc:
                raise MalformedRow(line_number, str(exc)) from None
    return rows


BILLS_HEADER = (
    "scheme",
    "seed",
    "meter_id",
    "billing_period",
    "consumed_units_masked",
    "base_units",
    "surcharge_units",
    "error_credit",
    "total",
)


def write_bills_csv(rows, path) -> None:
    """Emit per-meter billing statements at fixed 6-decimal precision.

    Row fields follow `BILLS_HEADER`; the caller supplies rows already in
    that order.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BILLS_HEADER)
        for scheme, seed, meter_id, period, consumed, base, surcharge, credit, total in rows:
            writer.writerow(
                (
                    scheme,
                    seed,
                    meter_id,
                    period,
                    f"{consumed:.6f}",
                    f"{base:.6f}",
                    f"{surcharge:.6f}",
                    f"{credit:.6f}",
                    f"{total:.6f}",
                )
            )


def write_load_report_csv(rows, path) -> None:
    """Emit per-timestep reconstruction rows at fixed 6-decimal precision.

    Row fields: timestep, masked_sum, group_noise, reconstructed,
    true_total.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOAD_REPORT_HEADER)
        for timestep, masked_sum, group_noise, reconstructed, true_total in rows:
            writer.writerow(
                (
                    timestep,
                    f"{masked_sum:.6f}",
                    f"{group_noise:.6f}",
                    f"{reconstructed:.6f}",
                    f"{true_total:.6f}",
                )
            )
