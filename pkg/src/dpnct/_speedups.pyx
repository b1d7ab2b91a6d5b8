# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot simulation kernels.

Same contracts and same floats as `_kernel_py`: elementwise operations are
identical IEEE operations, and group accumulation walks meters in
ascending order so every (group, timestep) cell sees additions in the same
sequence as the pure path.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def compute_net_noise(injected, Py_ssize_t period_length):
    """Net noise per reading: fresh injection minus the one it cancels."""
    if period_length < 1:
        raise ValueError(f"period_length must be >= 1, got {period_length}")
    cdef double[:, ::1] inj = np.ascontiguousarray(injected, dtype=np.float64)
    cdef Py_ssize_t n = inj.shape[0]
    cdef Py_ssize_t t_max = inj.shape[1]
    out_arr = np.empty((n, t_max), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, t
    for i in range(n):
        for t in range(t_max):
            if t >= period_length:
                out[i, t] = inj[i, t] - inj[i, t - period_length]
            else:
                out[i, t] = inj[i, t]
    return out_arr


def mask_readings(readings, net_noise):
    """Masked wire values: true consumption plus net noise."""
    cdef double[:, ::1] x = np.ascontiguousarray(readings, dtype=np.float64)
    cdef double[:, ::1] net = np.ascontiguousarray(net_noise, dtype=np.float64)
    if x.shape[0] != net.shape[0] or x.shape[1] != net.shape[1]:
        raise ValueError(
            f"shape mismatch: {(x.shape[0], x.shape[1])} vs {(net.shape[0], net.shape[1])}"
        )
    out_arr = np.empty((x.shape[0], x.shape[1]), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, t
    for i in range(x.shape[0]):
        for t in range(x.shape[1]):
            out[i, t] = x[i, t] + net[i, t]
    return out_arr


def group_noise_sums(submissions, group_index, Py_ssize_t period_length, Py_ssize_t num_groups):
    """Per-(group, timestep) sums of member noise submissions."""
    cdef double[:, ::1] sub = np.ascontiguousarray(submissions, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] gidx = np.ascontiguousarray(group_index, dtype=np.int64)
    cdef Py_ssize_t n = sub.shape[0]
    cdef Py_ssize_t t_max = sub.shape[1]
    cdef Py_ssize_t rounds_needed = (t_max + period_length - 1) // period_length
    if gidx.shape[0] < rounds_needed or gidx.shape[1] != n:
        raise ValueError(
            f"group_index shape {(gidx.shape[0], gidx.shape[1])} cannot cover "
            f"{rounds_needed} rounds x {n} meters"
        )
    out_arr = np.zeros((num_groups, t_max), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, t, g
    for i in range(n):
        for t in range(t_max):
            g = gidx[t // period_length, i]
            if g < 0 or g >= num_groups:
                raise ValueError(f"group index {g} out of range for {num_groups} groups")
            out[g, t] += sub[i, t]
    return out_arr


def noise_pipeline(readings, injected, group_index, Py_ssize_t period_length,
                   Py_ssize_t num_groups, bint submit_net=True):
    """Full per-trial kernel pass: net noise, masked matrix, group sums."""
    net = compute_net_noise(injected, period_length)
    masked = mask_readings(readings, net)
    submissions = net if submit_net else np.ascontiguousarray(injected, dtype=np.float64)
    sums = group_noise_sums(submissions, group_index, period_length, num_groups)
    return net, masked, sums
