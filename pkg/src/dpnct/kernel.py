"""Backend selection for the hot simulation kernels.

The compiled extension is used when it built successfully; otherwise the
pure-numpy twin takes over. Both produce bit-identical floats (the test
suite holds them against each other), so the choice only affects speed.
Set DPNCT_FORCE_PURE=1 to ignore the compiled extension.
"""

from __future__ import annotations

import os

from . import _kernel_py

_IMPLEMENTATIONS = {"pure": _kernel_py}
try:
    from . import _speedups  # type: ignore[attr-defined]

    _IMPLEMENTATIONS["compiled"] = _speedups
except ImportError:
    _speedups = None

if os.environ.get("DPNCT_FORCE_PURE"):
    _active = _kernel_py
else:
    _active = _IMPLEMENTATIONS.get("compiled", _kernel_py)


def active_backend() -> str:
    """Name of the backend in use: 'compiled' or 'pure'."""
    return _active.BACKEND_NAME


def available_backends() -> dict:
    """All importable backend modules, keyed by name."""
    return dict(_IMPLEMENTATIONS)


compute_net_noise = _active.compute_net_noise
mask_readings = _active.mask_readings
group_noise_sums = _active.group_noise_sums
noise_pipeline = _active.noise_pipeline
