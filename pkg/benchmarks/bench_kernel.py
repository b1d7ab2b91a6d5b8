"""Benchmark the pure-numpy kernels against the compiled extension.

Runs the full per-trial kernel pass (net noise, masking, group sums) on a
synthetic workload at the default simulation scale for both backends,
reports per-call timings and the speedup, and verifies that the two
backends return bit-identical arrays.
"""

import argparse
import time

import numpy as np

from dpnct import _kernel_py
from dpnct.grouping import assignments_for_rounds, group_index_matrix

try:
    from dpnct import _speedups
except ImportError:
    _speedups = None


def make_workload(households, timesteps, groups, period_length, seed):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
    readings = rng.uniform(0.0, 10.0, size=(households, timesteps))
    injected = rng.laplace(0.0, 10.0, size=(households, timesteps))
    rounds = -(-timesteps // period_length)
    assignments = assignments_for_rounds(households, groups, rounds, np.random.SeedSequence([seed, 1]))
    return readings, injected, group_index_matrix(assignments, households)


def time_backend(module, workload, period_length, groups, repeats):
    readings, injected, group_index = workload
    outputs = None
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        outputs = module.noise_pipeline(readings, injected, group_index, period_length, groups)
        best = min(best, time.perf_counter() - started)
    return best, outputs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--households", type=int, default=200)
    parser.add_argument("--timesteps", type=int, default=4320)
    parser.add_argument("--groups", type=int, default=10)
    parser.add_argument("--period-length", type=int, default=6, dest="period_length")
    parser.add_argument("--repeats", type=int, default=5, help="take the best of this many runs")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workload = make_workload(args.households, args.timesteps, args.groups, args.period_length, args.seed)
    print(
        f"workload: {args.households} meters x {args.timesteps} timesteps, "
        f"{args.groups} groups, period {args.period_length}, best of {args.repeats}"
    )

    pure_time, pure_out = time_backend(_kernel_py, workload, args.period_length, args.groups, args.repeats)
    print(f"{'backend':<10} {'seconds':>10}")
    print(f"{'pure':<10} {pure_time:>10.4f}")
    if _speedups is None:
        print("compiled backend not built; nothing to compare")
        return 0

    fast_time, fast_out = time_backend(_speedups, workload, args.period_length, args.groups, args.repeats)
    print(f"{'compiled':<10} {fast_time:>10.4f}")
    print(f"speedup: {pure_time / fast_time:.2f}x")

    for name, a, b in zip(("net", "masked", "group_sums"), pure_out, fast_out):
        if not np.array_equal(a, b):
            raise SystemExit(f"backend outputs differ for {name}")
    print("outputs bit-identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
