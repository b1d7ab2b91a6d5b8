"""Vectorised kernels against the stateful reference walker, and backend parity."""

import numpy as np
import pytest

from dpnct import _kernel_py, kernel
from dpnct.grouping import accumulate_group_noise, assignments_for_rounds, group_index_matrix
from dpnct.meter import CancellationScheme, SmartMeter

from .conftest import seeded_rng

try:
    from dpnct import _speedups
except ImportError:
    _speedups = None

BACKENDS = [_kernel_py] + ([_speedups] if _speedups is not None else [])
BACKEND_IDS = [m.BACKEND_NAME for m in BACKENDS]


def trial_inputs(seed, meters=7, timesteps=200):
    rng = seeded_rng(50, seed)
    readings = rng.uniform(0.0, 8.0, size=(meters, timesteps))
    injected = rng.laplace(0.0, 3.0, size=(meters, timesteps))
    return readings, injected


@pytest.mark.parametrize("backend", BACKENDS, ids=BACKEND_IDS)
class TestAgainstMeterReference:
    @pytest.mark.parametrize("scheme_name,timesteps", [
        ("hourly", 100),      # many full periods
        ("daily", 300),       # two full periods plus a partial tail
        ("weekly", 1100),     # one full period plus a partial tail
    ])
    def test_net_and_masked_match_stateful_meters(self, backend, scheme_name, timesteps):
        scheme = CancellationScheme.from_name(scheme_name)
        readings, injected = trial_inputs(1, meters=4, timesteps=timesteps)
        net = backend.compute_net_noise(injected, scheme.period_length)
        masked = backend.mask_readings(readings, net)
        for m in range(4):
            noise_iter = iter(injected[m])
            meter = SmartMeter(m, scheme, lambda it=noise_iter: next(it))
            wire = [meter.observe(readings[m, t]) for t in range(timesteps)]
            np.testing.assert_array_equal(net[m], [w.net_noise for w in wire])
            np.testing.assert_array_equal(masked[m], [w.masked_value for w in wire])

    def test_group_sums_match_protocol_accumulator(self, backend):
        readings, injected = trial_inputs(2, meters=9, timesteps=48)
        period_length = 6
        assignments = assignments_for_rounds(9, 3, 8, np.random.SeedSequence([51]))
        gidx = group_index_matrix(assignments, 9)
        net = backend.compute_net_noise(injected, period_length)
        sums = backend.group_noise_sums(net, gidx, period_length, 3)
        for t in (0, 5, 6, 17, 47):
            assignment = assignments[t // period_length]
            reports = accumulate_group_noise(assignment, {m: net[m, t] for m in range(9)}, timestep=t)
            for report in reports:
                assert sums[report.group_index, t] == report.aggregated_noise

    def test_pipeline_equals_composed_steps(self, backend):
        readings, injected = trial_inputs(3, meters=6, timesteps=36)
        gidx = group_index_matrix(assignments_for_rounds(6, 2, 6, np.random.SeedSequence([52])), 6)
        net, masked, sums = backend.noise_pipeline(readings, injected, gidx, 6, 2)
        np.testing.assert_array_equal(net, backend.compute_net_noise(injected, 6))
        np.testing.assert_array_equal(masked, backend.mask_readings(readings, net))
        np.testing.assert_array_equal(sums, backend.group_noise_sums(net, gidx, 6, 2))

    def test_pipeline_literal_submissions(self, backend):
        # literal mode: members submit fresh injections, not net noise, so
        # the masters' sums no longer equal the noise inside the masked data
        readings, injected = trial_inputs(4, meters=6, timesteps=36)
        gidx = group_index_matrix(assignments_for_rounds(6, 2, 6, np.random.SeedSequence([53])), 6)
        _, _, sums = backend.noise_pipeline(readings, injected, gidx, 6, 2, submit_net=False)
        np.testing.assert_array_equal(sums, backend.group_noise_sums(injected, gidx, 6, 2))

    def test_first_period_net_equals_injection(self, backend):
        _, injected = trial_inputs(5, meters=3, timesteps=30)
        net = backend.compute_net_noise(injected, 6)
        np.testing.assert_array_equal(net[:, :6], injected[:, :6])

    def test_period_longer_than_horizon(self, backend):
        _, injected = trial_inputs(6, meters=3, timesteps=10)
        net = backend.compute_net_noise(injected, 144)
        np.testing.assert_array_equal(net, injected)

    def test_validation_errors(self, backend):
        readings, injected = trial_inputs(7, meters=3, timesteps=12)
        with pytest.raises(ValueError):
            backend.compute_net_noise(injected, 0)
        with pytest.raises(ValueError):
            backend.mask_readings(readings, injected[:, :6])
        short_gidx = np.zeros((1, 3), dtype=np.int64)
        with pytest.raises(ValueError):
            backend.group_noise_sums(injected, short_gidx, 6, 1)
        bad_gidx = np.full((2, 3), 5, dtype=np.int64)
        with pytest.raises(ValueError):
            backend.group_noise_sums(injected, bad_gidx, 6, 2)


@pytest.mark.skipif(_speedups is None, reason="compiled extension not built")
class TestBackendParity:
    @pytest.mark.parametrize("seed", range(5))
    def test_bit_identical_outputs(self, seed):
        readings, injected = trial_inputs(seed, meters=11, timesteps=432)
        gidx = group_index_matrix(
            assignments_for_rounds(11, 4, 3, np.random.SeedSequence([54, seed])), 11
        )
        pure = _kernel_py.noise_pipeline(readings, injected, gidx, 144, 4)
        fast = _speedups.noise_pipeline(readings, injected, gidx, 144, 4)
        for a, b in zip(pure, fast):
            np.testing.assert_array_equal(a, b)
            assert a.dtype == b.dtype == np.float64

    def test_backend_names(self):
        assert _kernel_py.BACKEND_NAME == "pure"
        assert _speedups.BACKEND_NAME == "compiled"


class TestSelection:
    def test_active_backend_is_available(self):
        assert kernel.active_backend() in kernel.available_backends()

    def test_force_pure_env(self):
        import subprocess
        import sys

        code = (
            "import os; os.environ['DPNCT_FORCE_PURE'] = '1'; "
            "from dpnct import kernel; print(kernel.active_backend())"
        )
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "pure"
