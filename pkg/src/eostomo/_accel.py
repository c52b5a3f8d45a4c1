"""Optional numba acceleration.

The compiled kernels are used when numba imports cleanly and the environment
variable ``EOSTOMO_DISABLE_NUMBA`` is unset (or set to ``0``/``false``).  Setting
it to ``1`` forces the vectorized numpy implementations, which produce the same
numbers to rounding error.
"""

from __future__ import annotations

import os

_FLAG = "EOSTOMO_DISABLE_NUMBA"

try:  # pragma: no cover - exercised implicitly by the import
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _numba = None
    HAVE_NUMBA = False


def numba_disabled_by_env() -> bool:
    """Return True when the environment asks for the numpy fallback."""
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()

JIT_OPTIONS = {"cache": True, "nogil": True, "fastmath": False}


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    The uncompiled function is still importable so the numba path can be
    exercised (slowly) in tests on machines without numba.
    """
    if not HAVE_NUMBA:
        return func
    return _numba.njit(**JIT_OPTIONS)(func)


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"
