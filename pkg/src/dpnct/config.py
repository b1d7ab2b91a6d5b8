"""Scenario configuration: defaults, JSON loading, flag overrides.

The default configuration is the reference experiment: 200 households,
one 30-day billing period at 10-minute granularity, privacy budget 1.0,
all three cancellation schemes plus the trusted-aggregator baseline, and
20 repeated trials (seeds 0..19).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .aggregator import TariffConfig
from .errors import ConfigError

SCHEME_CHOICES = ("hourly", "daily", "weekly", "drdp")
BUDGET_MODES = ("per-reading", "composed")
NOISE_MODES = ("net", "literal-alg2")

DEFAULT_SEEDS = tuple(range(20))


@dataclass(frozen=True)
class SimulationConfig:
    """Everything a scenario run needs, validated at construction."""

    epsilon: float = 1.0
    schemes: tuple[str, ...] = SCHEME_CHOICES
    households: int = 200
    days: int = 30
    groups: int = 10
    granularity_minutes: int = 10
    max_allowed_units: float = 5500.0
    unit_price: float = 10.0
    surcharge_price: float = 20.0
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    budget_mode: str = "per-reading"
    noise_mode: str = "net"
    output_dir: str = "results"
    data_csv: str | None = None
    data_seed: int = 7
    profile_household: int | None = None
    profile_day: int | None = None
    emit_load_reports: bool = False
    emit_bills: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not self.schemes:
            raise ConfigError("at least one scheme required")
        for scheme in self.schemes:
            if scheme not in SCHEME_CHOICES:
                raise ConfigError(f"unknown scheme {scheme!r}, choose from {SCHEME_CHOICES}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("duplicate scheme names")
        if self.households < 1:
            raise ConfigError(f"households must be >= 1, got {self.households}")
        if self.days < 1:
            raise ConfigError(f"days must be >= 1, got {self.days}")
        if not 1 <= self.groups <= self.households:
            raise ConfigError(
                f"groups must lie in [1, households], got {self.groups} for {self.households} households"
            )
        if self.granularity_minutes < 1 or 60 % self.granularity_minutes != 0:
            raise ConfigError(f"granularity must divide 60 minutes, got {self.granularity_minutes}")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("duplicate seeds")
        if any(int(s) < 0 for s in self.seeds) or self.data_seed < 0:
            raise ConfigError("seeds must be >= 0 (they feed the rng seed sequence)")
        if self.budget_mode not in BUDGET_MODES:
            raise ConfigError(f"budget_mode must be one of {BUDGET_MODES}, got {self.budget_mode!r}")
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(f"noise_mode must be one of {NOISE_MODES}, got {self.noise_mode!r}")
        if self.profile_household is not None and not 0 <= self.profile_household < self.households:
            raise ConfigError(f"profile_household out of range: {self.profile_household}")
        if self.profile_day is not None and not 0 <= self.profile_day < self.days:
            raise ConfigError(f"profile_day out of range: {self.profile_day}")
        try:
            self.tariff  # noqa: B018 - force TariffConfig invariants now
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def tariff(self) -> TariffConfig:
        return TariffConfig(
            max_allowed_units=self.max_allowed_units,
            unit_price=self.unit_price,
            surcharge_price=self.surcharge_price,
        )


_FIELD_NAMES = {f.name for f in dataclasses.fields(SimulationConfig)}


def load_config(path=None, overrides: dict | None = None) -> SimulationConfig:
    """Build a config from an optional JSON file plus flag overrides.

    File keys and override keys must be config field names; overrides with
    value None are ignored so unset CLI flags leave file values alone.
    """
    values: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    unknown = set(values) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("schemes", "seeds"):
        if key in values and isinstance(values[key], list):
            values[key] = tuple(values[key])
    try:
        return SimulationConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
