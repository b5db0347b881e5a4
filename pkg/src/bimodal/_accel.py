"""Backend switch for the compiled kernels.

Numba is used when it is importable and ``BIMODAL_DISABLE_NUMBA`` is not set
to a truthy value. The flag is read once, at import time.
"""

from __future__ import annotations

import os

DISABLE_ENV = "BIMODAL_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()


def njit(func):
    """Compile ``func`` in nopython mode, or return ``None`` without numba.

    Callers keep a numpy twin of every kernel, so a missing compiler only
    removes the fast path.
    """
    if _numba is None:
        return None
    return _numba.njit(cache=True, fastmath=False)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
