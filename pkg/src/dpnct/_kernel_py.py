"""Pure-numpy implementation of the hot simulation kernels.

Drop-in twin of the compiled extension: same signatures, and engineered to
produce bit-identical floats. Net noise and masking are single elementwise
operations in both backends; group accumulation adds one meter's row at a
time in ascending meter order, matching both the compiled loop and the
per-timestep protocol reference (`grouping.accumulate_group_noise`).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def compute_net_noise(injected: np.ndarray, period_length: int) -> np.ndarray:
    """Net noise per reading: fresh injection minus the one it cancels.

    The injection at timestep t is cancelled at t + period_length, so the
    net value at t is injected[t] - injected[t - period_length] (nothing to
    cancel during the first period).
    """
    injected = np.ascontiguousarray(injected, dtype=np.float64)
    if period_length < 1:
        raise ValueError(f"period_length must be >= 1, got {period_length}")
    net = injected.copy()
    if period_length < injected.shape[1]:
        net[:, period_length:] -= injected[:, :-period_length]
    return net


def mask_readings(readings: np.ndarray, net_noise: np.ndarray) -> np.ndarray:
    """Masked wire values: true consumption plus net noise."""
    readings = np.ascontiguousarray(readings, dtype=np.float64)
    net_noise = np.ascontiguousarray(net_noise, dtype=np.float64)
    if readings.shape != net_noise.shape:
        raise ValueError(f"shape mismatch: {readings.shape} vs {net_noise.shape}")
    return readings + net_noise


def group_noise_sums(
    submissions: np.ndarray,
    group_index: np.ndarray,
    period_length: int,
    num_groups: int,
) -> np.ndarray:
    """Per-(group, timestep) sums of member noise submissions.

    group_index maps (round, meter) to a group, where round = t divided by
    period_length. Contributions accumulate meter 0 first, meter 1 next,
    and so on, which fixes the float result independent of backend.
    """
    submissions = np.ascontiguousarray(submissions, dtype=np.float64)
    group_index = np.ascontiguousarray(group_index, dtype=np.int64)
    num_meters, timesteps = submissions.shape
    rounds_needed = -(-timesteps // period_length)
    if group_index.shape[0] < rounds_needed or group_index.shape[1] != num_meters:
        raise ValueError(
            f"group_index shape {group_index.shape} cannot cover "
            f"{rounds_needed} rounds x {num_meters} meters"
        )
    used = group_index[:rounds_needed]
    if used.min() < 0 or used.max() >= num_groups:
        raise ValueError(f"group index out of range for {num_groups} groups")
    t_index = np.arange(timesteps)
    group_of_t = group_index[t_index // period_length, :]  # (timesteps, meters)
    out = np.zeros((num_groups, timesteps), dtype=np.float64)
    for meter in range(num_meters):
        out[group_of_t[:, meter], t_index] += submissions[meter]
    return out


def noise_pipeline(
    readings: np.ndarray,
    injected: np.ndarray,
    group_index: np.ndarray,
    period_length: int,
    num_groups: int,
    submit_net: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full per-trial kernel pass: net noise, masked matrix, group sums.

    submit_net selects what members send their master: the net noise
    actually embedded in the masked readings (default) or the raw fresh
    injections.
    """
    net = compute_net_noise(injected, period_length)
    masked = mask_readings(readings, net)
    submissions = net if submit_net else np.ascontiguousarray(injected, dtype=np.float64)
    sums = group_noise_sums(submissions, group_index, period_length, num_groups)
    return net, masked, sums
