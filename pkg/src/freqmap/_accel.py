"""Backend selection for the compiled kernels.

Set ``FREQMAP_BACKEND=numpy`` to force the pure-numpy code paths; the default
uses numba when it can be imported.
"""

from __future__ import annotations

import os

BACKEND_ENV = "FREQMAP_BACKEND"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in {"numba", "numpy"}:
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    return value


USE_NUMBA = HAVE_NUMBA and _requested_backend() == "numba"


def njit(fn):
    """Compile ``fn`` with numba if available, else return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
