"""Exception and warning types shared across the dpnct package."""


class DpnctError(Exception):
    """Base class for all dpnct errors."""


class EmptyInput(DpnctError, ValueError):
    """A reading matrix or series was empty where data is required."""


class ZeroSensitivity(DpnctError, ValueError):
    """All readings are exactly zero; the noise scale would be degenerate."""


class OutOfOrderTimestep(DpnctError, ValueError):
    """A meter processed a reading that skips or repeats a timestep."""


class TooManyGroups(DpnctError, ValueError):
    """Requested more groups than there are meters to fill them."""


class MissingSubmission(DpnctError, KeyError):
    """A group member failed to submit its noise for a timestep."""

    def __init__(self, meter_id, timestep=None):
        self.meter_id = meter_id
        self.timestep = timestep
        where = f" at timestep {timestep}" if timestep is not None else ""
        super().__init__(f"no noise submission from meter {meter_id}{where}")


class ZeroDenominator(DpnctError, ValueError):
    """A relative-error metric was asked to divide by a zero true total."""


class DegenerateSeries(DpnctError, ValueError):
    """Correlation of a constant (or too short) series is undefined."""


class MalformedRow(DpnctError, ValueError):
    """A CSV row failed schema validation."""

    def __init__(self, line_number, reason):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class NonMonotoneTimesteps(DpnctError, ValueError):
    """A household's CSV timesteps are not the contiguous run 0..T-1."""


class ConfigError(DpnctError, ValueError):
    """A simulation configuration value is out of range or inconsistent."""


class IncompleteRound(UserWarning):
    """A load report was produced with one or more group reports missing."""
