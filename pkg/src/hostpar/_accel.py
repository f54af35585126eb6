"""Numba acceleration switch.

Hot kernels in :mod:`hostpar._kernels` are written so that the same source
runs compiled (numba ``@njit``) or as plain Python/numpy. Set the
environment variable ``HOSTPAR_NO_NUMBA=1`` before import to force the
pure-Python/numpy fallback; it is also selected automatically when numba
is not installed.

``benchmarks/bench_kernels.py`` times both paths.
"""

import os

_FLAG = os.environ.get("HOSTPAR_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via HOSTPAR_NO_NUMBA")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


def maybe_jit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True)(func)
    return func


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
