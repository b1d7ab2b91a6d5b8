"""Differential-privacy noise primitives.

Implements the pieces every other module builds on: pointwise sensitivity
of a reading matrix, the Laplace scale derived from the privacy budget,
per-meter gamma-difference noise shares (the infinitely divisible
decomposition of the Laplace distribution), and whole-Laplace sampling for
the trusted-aggregator baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, ZeroSensitivity


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy budget, query sensitivity, and share population.

    Args:
        epsilon: privacy budget, in (0, 1]. Larger is less private.
        sensitivity: pointwise sensitivity in kWh (worst-case influence of
            one reading).
        population: number of meters jointly generating the noise; each
            contributes one gamma-difference share.
    """

    epsilon: float
    sensitivity: float
    population: int

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.sensitivity <= 0.0:
            raise ValueError(f"sensitivity must be positive, got {self.sensitivity}")
        if self.population < 1:
            raise ValueError(f"population must be >= 1, got {self.population}")


@dataclass(frozen=True)
class NoiseScale:
    """Scale parameter of the Laplace noise, in kWh."""

    value: float

    def __post_init__(self):
        if self.value <= 0.0:
            raise ValueError(f"noise scale must be positive, got {self.value}")


def compute_pointwise_sensitivity(readings) -> float:
    """Maximum absolute reading over all meters and all timesteps, in kWh.

    Raises:
        EmptyInput: no readings at all.
        ZeroSensitivity: every reading is exactly zero.
    """
    arr = np.asarray(readings, dtype=float)
    if arr.size == 0:
        raise EmptyInput("cannot compute sensitivity of an empty reading set")
    sensitivity = float(np.max(np.abs(arr)))
    if sensitivity == 0.0:
        raise ZeroSensitivity("all readings are zero; noise scale would be degenerate")
    return sensitivity


def laplace_scale(params: PrivacyParams) -> NoiseScale:
    """Per-reading Laplace scale: sensitivity / epsilon."""
    return NoiseScale(params.sensitivity / params.epsilon)


def composed_laplace_scale(params: PrivacyParams, num_queries: int) -> NoiseScale:
    """Laplace scale under uniform budget composition over ``num_queries``.

    Splits epsilon evenly across the queries of a billing period, so each
    reading is protected at epsilon / num_queries. Used only in the
    "composed" budget mode for sensitivity analysis; the default mode
    spends the full epsilon per reading.
    """
    if num_queries < 1:
        raise ValueError(f"num_queries must be >= 1, got {num_queries}")
    return NoiseScale(params.sensitivity * num_queries / params.epsilon)


def sample_gamma_share(scale: NoiseScale, population: int, rng: np.random.Generator, size=None):
    """One meter's additive noise share: G - G' with G, G' ~ Gamma(1/N, scale).

    Summing one share from each of ``population`` meters yields a draw from
    Laplace(0, scale): the gamma-difference decomposition lets meters add
    noise independently while the aggregate stays Laplace. Deterministic
    given the generator state.

    Returns a float when ``size`` is None, else an ndarray of that shape.
    """
    if population < 1:
        raise ValueError(f"population must be >= 1, got {population}")
    shape = 1.0 / population
    draw = rng.gamma(shape, scale.value, size) - rng.gamma(shape, scale.value, size)
    if size is None:
        return float(draw)
    return draw


def sample_laplace(scale: NoiseScale, rng: np.random.Generator, size=None):
    """Zero-mean Laplace draw(s) with the given scale; baseline mechanism.

    Returns a float when ``size`` is None, else an ndarray of that shape.
    """
    draw = rng.laplace(0.0, scale.value, size)
    if size is None:
        return float(draw)
    return draw
